"""Strongly connected components.

Every vertex communicates with itself, so isolated vertices form singleton
components and loops never change the partition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .generator import Digraph

ORACLE_MAX_N = 64


@dataclass(frozen=True, eq=False)
class SccSummary:
    """``component_of[v]`` is the id of v's component, ids in discovery order.

    ``sizes`` lists component sizes in descending order.
    """

    component_of: np.ndarray
    sizes: np.ndarray

    @property
    def n1(self) -> int:
        return int(self.sizes[0]) if self.sizes.size else 0

    @property
    def n2(self) -> int:
        return int(self.sizes[1]) if self.sizes.size > 1 else 0

    @property
    def count(self) -> int:
        return int(self.sizes.size)

    def spectrum(self) -> list:
        """``(size, count)`` pairs, sizes descending."""
        vals, cnt = np.unique(self.sizes, return_counts=True)
        return [(int(s), int(c)) for s, c in zip(vals[::-1], cnt[::-1])]

    def members(self, cid: int) -> np.ndarray:
        return np.flatnonzero(self.component_of == cid)

    def largest(self) -> np.ndarray:
        """Vertices of a largest component."""
        if not self.component_of.size:
            return self.component_of
        counts = np.bincount(self.component_of)
        return self.members(int(np.argmax(counts)))

    def canonical(self) -> frozenset:
        """Partition as a set of frozensets, independent of id assignment."""
        groups = {}
        for v, c in enumerate(self.component_of.tolist()):
            groups.setdefault(c, []).append(v)
        return frozenset(frozenset(g) for g in groups.values())


def _summary(comp: np.ndarray) -> SccSummary:
    comp = np.asarray(comp, dtype=np.int64)
    sizes = np.sort(np.bincount(comp))[::-1] if comp.size else np.empty(0, dtype=np.int64)
    comp.setflags(write=False)
    return SccSummary(comp, np.ascontiguousarray(sizes))


def compute_scc(g: Digraph) -> SccSummary:
    """Tarjan's algorithm with an explicit call stack (no recursion)."""
    n = g.n
    indptr = g.fwd_indptr.tolist()
    indices = g.fwd_indices.tolist()
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    comp = [-1] * n
    stack = []
    counter = 0
    ncomp = 0
    for root in range(n):
        if index[root] != -1:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        # frames are [vertex, next arc position]
        calls = [[root, indptr[root]]]
        while calls:
            frame = calls[-1]
            v, ptr = frame
            end = indptr[v + 1]
            descended = False
            while ptr < end:
                w = indices[ptr]
                ptr += 1
                if index[w] == -1:
                    frame[1] = ptr
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    calls.append([w, indptr[w]])
                    descended = True
                    break
                if on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if descended:
                continue
            calls.pop()
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
            if calls:
                u = calls[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
    return _summary(comp)


def scc_oracle(g: Digraph) -> SccSummary:
    """Components from the O(n^3) transitive closure; small graphs only."""
    n = g.n
    if n > ORACLE_MAX_N:
        raise ValueError(f"scc_oracle supports n <= {ORACLE_MAX_N}, got {n}")
    reach = np.eye(n, dtype=bool)
    for u, v in g.arcs():
        reach[u, v] = True
    for w in range(n):
        reach |= reach[:, w:w + 1] & reach[w:w + 1, :]
    mutual = reach & reach.T
    comp = np.full(n, -1, dtype=np.int64)
    ncomp = 0
    for v in range(n):
        if comp[v] == -1:
            comp[mutual[v]] = ncomp
            ncomp += 1
    return _summary(comp)


def write_spectrum(summary: SccSummary, path) -> None:
    """Write ``size count`` lines, sizes descending."""
    with open(path, "w") as fh:
        for size, count in summary.spectrum():
            fh.write(f"{size} {count}\n")
