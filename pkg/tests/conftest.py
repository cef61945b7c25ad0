import math

import numpy as np
import pytest

from giantscc.generator import Digraph


def bisect_survival(c, lo=1e-9, hi=1.0, tol=1e-12):
    """Positive root of rho = 1 - exp(-c rho) by bisection."""
    f = lambda r: r - 1.0 + math.exp(-c * r)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def random_digraph(rng, n, density=None):
    if density is None:
        density = rng.uniform(0, 1)
    adj = rng.random((n, n)) < density
    u, v = np.nonzero(adj)
    return Digraph.from_arcs(n, u, v)


def floyd_warshall_reach(n, arcs):
    reach = [[u == v for v in range(n)] for u in range(n)]
    for u, v in arcs:
        reach[u][v] = True
    for w in range(n):
        for u in range(n):
            if reach[u][w]:
                for v in range(n):
                    if reach[w][v]:
                        reach[u][v] = True
    return reach


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
