"""Truncated forward/backward explorations and the big-vertex estimator.

A vertex is x-big if at least ``omega`` vertices are reachable from it, y-big
if at least ``omega`` vertices reach it.  The fraction of vertices that are
both is a second estimate of the giant component fraction, independent of
any component computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .generator import Digraph

EXACT_MAX_N = 10**6
DEFAULT_SUBSAMPLE = 10**5


@dataclass(frozen=True)
class ExplorationOutcome:
    reached: int
    hit_cap: bool
    visited: Optional[np.ndarray] = None


def default_omega(n: int) -> int:
    """``ceil(ln n)``, at least 1."""
    return max(1, math.ceil(math.log(n))) if n > 1 else 1


def _explore(indptr, indices, v, omega, mark, stamp, keep):
    """FIFO exploration from ``v``; stops once the list holds ``omega`` vertices.

    ``mark`` is a reusable per-vertex scratch list: vertex ``w`` counts as
    collected when ``mark[w] == stamp``.
    """
    mark[v] = stamp
    found = [v]
    head = 0
    while len(found) < omega and head < len(found):
        u = found[head]
        head += 1
        for w in indices[indptr[u]:indptr[u + 1]]:
            if mark[w] != stamp:
                mark[w] = stamp
                found.append(w)
    return len(found), len(found) >= omega, (found if keep else None)


def _explore_one(indptr, indices, n, v, omega, keep):
    if not 0 <= v < n:
        raise IndexError(f"vertex {v} out of range for n={n}")
    if omega < 1:
        raise ValueError(f"omega must be at least 1, got {omega}")
    mark = [0] * n
    reached, hit, found = _explore(indptr, indices.tolist(), int(v), int(omega), mark, 1, keep)
    return ExplorationOutcome(reached, hit, None if found is None else np.array(found, dtype=np.int64))


def explore_forward(g: Digraph, v: int, omega: int, keep_visited: bool = False) -> ExplorationOutcome:
    """Collect vertices reachable from ``v`` until ``omega`` are found or none remain.

    The list may overshoot ``omega`` by at most the out-degree of the last
    processed vertex.
    """
    return _explore_one(g.fwd_indptr.tolist(), g.fwd_indices, g.n, v, omega, keep_visited)


def explore_backward(g: Digraph, v: int, omega: int, keep_visited: bool = False) -> ExplorationOutcome:
    """Same as :func:`explore_forward` on the transposed digraph."""
    return _explore_one(g.rev_indptr.tolist(), g.rev_indices, g.n, v, omega, keep_visited)


def big_vertices(g: Digraph, omega: int, vertices=None) -> np.ndarray:
    """Boolean mask over ``vertices`` (all by default): x-big and y-big."""
    n = g.n
    omega = int(omega)
    if omega < 1:
        raise ValueError(f"omega must be at least 1, got {omega}")
    fp, fi = g.fwd_indptr.tolist(), g.fwd_indices.tolist()
    rp, ri = g.rev_indptr.tolist(), g.rev_indices.tolist()
    verts = range(n) if vertices is None else [int(v) for v in vertices]
    mark = [0] * n
    stamp = 0
    out = []
    for v in verts:
        stamp += 1
        big = _explore(fp, fi, v, omega, mark, stamp, False)[1]
        if big:
            stamp += 1
            big = _explore(rp, ri, v, omega, mark, stamp, False)[1]
        out.append(big)
    return np.array(out, dtype=bool)


@dataclass(frozen=True)
class BigFraction:
    fraction: float
    ci_low: float
    ci_high: float
    sampled: int
    exact: bool

    def __float__(self):
        return self.fraction


def big_fraction_estimate(g: Digraph, omega: Optional[int] = None, subsample: Optional[int] = None,
                          seed: int = 0, z: float = 1.959963984540054) -> BigFraction:
    """``|B(omega)| / n``, exactly or from a uniform vertex subsample.

    Without ``subsample`` every vertex is examined when ``n <= 10**6`` and
    ``10**5`` vertices are sampled otherwise.  Subsample estimates carry a
    Wilson score interval at level ``z``.
    """
    n = g.n
    if n == 0:
        return BigFraction(0.0, 0.0, 0.0, 0, True)
    omega = default_omega(n) if omega is None else int(omega)
    if subsample is None and n > EXACT_MAX_N:
        subsample = DEFAULT_SUBSAMPLE
    if subsample is None or subsample >= n:
        frac = float(big_vertices(g, omega).mean())
        return BigFraction(frac, frac, frac, n, True)
    rng = np.random.default_rng(seed)
    sample = rng.choice(n, size=int(subsample), replace=False)
    m = sample.size
    phat = float(big_vertices(g, omega, sample).mean())
    denom = 1.0 + z * z / m
    centre = (phat + z * z / (2 * m)) / denom
    half = z * math.sqrt(phat * (1 - phat) / m + z * z / (4 * m * m)) / denom
    return BigFraction(phat, max(0.0, centre - half), min(1.0, centre + half), m, False)


def big_fraction(g: Digraph, omega: Optional[int] = None, subsample: Optional[int] = None, seed: int = 0) -> float:
    """Fraction of vertices that are both x-big and y-big."""
    return big_fraction_estimate(g, omega, subsample, seed).fraction
