import numpy as np
import pytest

from conftest import floyd_warshall_reach, random_digraph
from giantscc.branching import giant_fraction
from giantscc.exploration import (big_fraction, big_fraction_estimate, big_vertices, default_omega,
                                  explore_backward, explore_forward)
from giantscc.generator import Digraph, complete_digraph, sample_digraph
from giantscc.model import validate_model
from giantscc.scc import compute_scc


def test_isolated_vertex():
    g = Digraph.from_arcs(3, [1], [2])
    for omega in (2, 5):
        out = explore_forward(g, 0, omega)
        assert (out.reached, out.hit_cap) == (1, False)


def test_single_vertex_omega_one():
    out = explore_forward(Digraph.from_arcs(1, [], []), 0, 1)
    assert out.hit_cap and out.reached == 1


def test_path_hits_cap():
    g = Digraph.from_arcs(3, [0, 1], [1, 2])
    out = explore_forward(g, 0, 2)
    assert out.hit_cap and out.reached >= 2


def test_cycle_fully_explored():
    g = Digraph.from_arcs(5, np.arange(5), (np.arange(5) + 1) % 5)
    out = explore_forward(g, 0, 10, keep_visited=True)
    assert (out.reached, out.hit_cap) == (5, False)
    assert sorted(out.visited.tolist()) == [0, 1, 2, 3, 4]
    assert explore_forward(g, 0, 5).hit_cap


def test_overshoot_bounded_by_last_degree():
    # star: the centre adds all leaves at once
    n = 50
    g = Digraph.from_arcs(n, np.zeros(n - 1, dtype=int), np.arange(1, n))
    out = explore_forward(g, 0, 3)
    assert out.hit_cap and out.reached == n
    assert out.reached - 3 <= len(g.out_neighbors(0))


def test_invariants_against_reachability(rng):
    for _ in range(300):
        n = int(rng.integers(1, 13))
        g = random_digraph(rng, n, density=rng.uniform(0, 0.4))
        reach = floyd_warshall_reach(n, g.arcs().tolist())
        for v in range(n):
            omega = int(rng.integers(1, n + 2))
            fx = explore_forward(g, v, omega)
            size_x = sum(reach[v])
            size_y = sum(reach[u][v] for u in range(n))
            if fx.hit_cap:
                assert fx.reached >= omega
            else:
                assert fx.reached == size_x
            assert fx.hit_cap == (size_x >= omega)
            bx = explore_backward(g, v, omega)
            assert bx.hit_cap == (size_y >= omega)


def test_backward_is_forward_on_transpose(rng):
    for _ in range(200):
        n = int(rng.integers(1, 13))
        g = random_digraph(rng, n)
        gt = g.transpose()
        for v in range(n):
            omega = int(rng.integers(1, 14))
            a = explore_backward(g, v, omega, keep_visited=True)
            b = explore_forward(gt, v, omega, keep_visited=True)
            assert (a.reached, a.hit_cap) == (b.reached, b.hit_cap)
            np.testing.assert_array_equal(a.visited, b.visited)


def test_source_in_degree_zero():
    g = Digraph.from_arcs(3, [0, 0], [1, 2])
    assert explore_backward(g, 0, 3).reached == 1


def test_complete_backward_cap():
    assert explore_backward(complete_digraph(4), 2, 3).hit_cap


def test_bad_arguments():
    g = Digraph.from_arcs(2, [], [])
    with pytest.raises(IndexError):
        explore_forward(g, 2, 1)
    with pytest.raises(ValueError):
        explore_forward(g, 0, 0)


def test_big_fraction_trivial():
    assert big_fraction(Digraph.from_arcs(10, [], []), 2) == 0.0
    assert big_fraction(complete_digraph(10), 5) == 1.0
    assert big_fraction(complete_digraph(10), 11) == 0.0


def test_monotone_in_omega(rng):
    spec = validate_model([0.5, 0.5], [[1.5, 0.5], [1.0, 1.2]]).spec(800)
    for seed in range(3):
        g = sample_digraph(spec, seed)
        prev = None
        for omega in range(1, 40):
            cur = big_vertices(g, omega)
            if prev is not None:
                assert not np.any(cur & ~prev)
            prev = cur


def test_scc_members_are_big(rng):
    spec = validate_model([1.0], [[1.8]]).spec(1000)
    g = sample_digraph(spec, 4)
    s = compute_scc(g)
    big = big_vertices(g, 10)
    counts = np.bincount(s.component_of)
    in_large = counts[s.component_of] >= 10
    assert in_large.any()
    assert np.all(big[in_large])


def test_omega_beyond_n():
    g = sample_digraph(validate_model([1.0], [[3.0]]).spec(200), 1)
    assert big_fraction(g, 201) == 0.0


def test_default_omega():
    assert default_omega(100000) == 12
    assert default_omega(1) == 1


def test_subsample_interval_covers_exact():
    g = sample_digraph(validate_model([1.0], [[2.0]]).spec(20000), 9)
    exact = big_fraction(g, 10)
    est = big_fraction_estimate(g, 10, subsample=5000, seed=3)
    assert not est.exact and est.sampled == 5000
    assert est.ci_low <= exact <= est.ci_high
    assert float(est) == est.fraction


def test_estimator_near_analytic():
    n = 10**5
    spec = validate_model([1.0], [[2.0]]).spec(n)
    rho, _ = giant_fraction(spec)
    g = sample_digraph(spec, 21)
    assert abs(big_fraction(g, default_omega(n)) - rho) < 0.03
