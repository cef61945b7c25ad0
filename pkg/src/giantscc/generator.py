"""Sampling the inhomogeneous random digraph.

Vertices are laid out in type-contiguous blocks, so the arc set splits into
``k*k`` rectangular blocks with a constant arc probability each.  Every block
is sampled by geometric skipping over its row-major cell enumeration, from its
own RNG substream derived from ``(seed, i, j)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import ModelSpec

MAX_VERTICES = 2**31 - 1
BYTES_PER_ARC = 40  # sort codes + two CSR copies + transient buffers
DEFAULT_MEMORY_CAP = 4 * 2**30


class MemoryEstimateError(MemoryError):
    pass


@dataclass(frozen=True, eq=False)
class Digraph:
    """Arc set on ``n`` vertices, stored as forward and reverse CSR.

    Neighbour lists are sorted.  ``type_of`` is all zeros for untyped graphs.
    """

    n: int
    type_of: np.ndarray
    fwd_indptr: np.ndarray
    fwd_indices: np.ndarray
    rev_indptr: np.ndarray
    rev_indices: np.ndarray

    @property
    def arc_count(self) -> int:
        return int(self.fwd_indices.size)

    @classmethod
    def from_arcs(cls, n: int, sources, targets, type_of=None) -> "Digraph":
        """Build from arc endpoint arrays; duplicate arcs are merged."""
        n = int(n)
        if n > MAX_VERTICES:
            raise ValueError(f"n={n} exceeds the 32-bit vertex index cap")
        u = np.asarray(sources, dtype=np.int64).ravel()
        v = np.asarray(targets, dtype=np.int64).ravel()
        if u.shape != v.shape:
            raise ValueError("sources and targets differ in length")
        if u.size and (min(u.min(), v.min()) < 0 or max(u.max(), v.max()) >= n):
            raise ValueError("arc endpoint out of range")
        codes = np.unique(u * n + v)
        return cls._from_sorted_codes(n, codes, type_of)

    @classmethod
    def _from_sorted_codes(cls, n, codes, type_of=None) -> "Digraph":
        if n:
            src, dst = np.divmod(codes, n)
        else:
            src = dst = codes
        fwd_indptr = _indptr(src, n)
        fwd_indices = dst.astype(np.int32)
        order = np.argsort(dst * n + src, kind="stable")
        rev_indptr = _indptr(dst[order], n)
        rev_indices = src[order].astype(np.int32)
        if type_of is None:
            type_of = np.zeros(n, dtype=np.int32)
        type_of = np.asarray(type_of, dtype=np.int32)
        for a in (fwd_indptr, fwd_indices, rev_indptr, rev_indices, type_of):
            a.setflags(write=False)
        return cls(n, type_of, fwd_indptr, fwd_indices, rev_indptr, rev_indices)

    def arcs(self) -> np.ndarray:
        """All arcs as an ``(m, 2)`` array, lexicographically sorted."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.fwd_indptr))
        return np.column_stack((src, self.fwd_indices.astype(np.int64)))

    def out_neighbors(self, v: int) -> np.ndarray:
        return self.fwd_indices[self.fwd_indptr[v]:self.fwd_indptr[v + 1]]

    def in_neighbors(self, v: int) -> np.ndarray:
        return self.rev_indices[self.rev_indptr[v]:self.rev_indptr[v + 1]]

    def transpose(self) -> "Digraph":
        return Digraph(self.n, self.type_of, self.rev_indptr, self.rev_indices, self.fwd_indptr, self.fwd_indices)

    def to_csr(self):
        """Forward adjacency as a ``scipy.sparse.csr_matrix``."""
        from scipy.sparse import csr_matrix

        data = np.ones(self.arc_count, dtype=np.int8)
        return csr_matrix((data, self.fwd_indices, self.fwd_indptr), shape=(self.n, self.n))


def _indptr(sorted_rows: np.ndarray, n: int) -> np.ndarray:
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(sorted_rows, minlength=n), out=indptr[1:])
    return indptr


def sample_block(n_rows: int, n_cols: int, prob: float, rng: np.random.Generator) -> np.ndarray:
    """Row-major offsets of the selected cells of an ``n_rows x n_cols`` grid.

    Each cell is selected independently with probability ``prob``: gaps
    between consecutive selected cells are drawn as Geometric(prob), so the
    cost is proportional to the number of selected cells.
    """
    total = int(n_rows) * int(n_cols)
    if total == 0 or prob <= 0.0:
        return np.empty(0, dtype=np.int64)
    if prob >= 1.0:
        return np.arange(total, dtype=np.int64)
    chunks = []
    last = -1
    while True:
        expected = (total - last - 1) * prob
        size = int(expected + 6.0 * math.sqrt(expected) + 16)
        offs = last + np.cumsum(rng.geometric(prob, size=size))
        if offs[-1] >= total:
            chunks.append(offs[offs < total])
            break
        chunks.append(offs)
        last = int(offs[-1])
    return np.concatenate(chunks)


def block_rng(seed: int, i: int, j: int) -> np.random.Generator:
    """Independent generator for type block ``(i, j)``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(i), int(j))))


def arc_probabilities(spec: ModelSpec) -> np.ndarray:
    return np.minimum(1.0, spec.p / spec.n)


def expected_arc_count(spec: ModelSpec) -> float:
    c = np.asarray(spec.counts, dtype=float)
    return float(c @ arc_probabilities(spec) @ c)


def sample_digraph(spec: ModelSpec, seed: int, memory_cap: Optional[int] = DEFAULT_MEMORY_CAP) -> Digraph:
    """Draw the random digraph for ``spec``; identical ``(spec, seed)`` gives an identical graph.

    Every ordered pair ``(u, v)``, loops included, is an arc independently
    with probability ``min(1, p_ij / n)``.
    """
    n, k = spec.n, spec.k
    if n * k * k == 0:
        raise ValueError("empty model")
    if n > MAX_VERTICES:
        raise ValueError(f"n={n} exceeds the 32-bit vertex index cap")
    expected = expected_arc_count(spec)
    if memory_cap is not None:
        mean = expected + 6.0 * math.sqrt(expected)
        estimate = int((mean + n) * BYTES_PER_ARC)
        if estimate > memory_cap:
            raise MemoryEstimateError(
                f"estimated {estimate / 2**20:.1f} MiB for ~{expected:.3g} arcs exceeds cap of {memory_cap / 2**20:.1f} MiB"
            )
    probs = arc_probabilities(spec)
    start = spec.offsets()
    counts = spec.counts
    code_blocks = []
    # blocks of one type row interleave by vertex row; a single sort merges them
    for i in range(k):
        for j in range(k):
            offs = sample_block(counts[i], counts[j], float(probs[i, j]), block_rng(seed, i, j))
            if offs.size:
                r, c = np.divmod(offs, counts[j])
                code_blocks.append((r + start[i]) * n + (c + start[j]))
    codes = np.concatenate(code_blocks) if code_blocks else np.empty(0, dtype=np.int64)
    codes.sort(kind="stable")
    return Digraph._from_sorted_codes(n, codes, spec.type_of())


def write_arc_list(g: Digraph, path) -> None:
    """Write ``u v`` lines (0-based), lexicographically sorted."""
    with open(path, "w") as fh:
        for u, v in g.arcs():
            fh.write(f"{u} {v}\n")


def read_arc_list(path, n: int) -> Digraph:
    data = np.loadtxt(path, dtype=np.int64, ndmin=2)
    if data.size == 0:
        return Digraph.from_arcs(n, [], [])
    return Digraph.from_arcs(n, data[:, 0], data[:, 1])


def complete_digraph(n: int, loops: bool = True) -> Digraph:
    u, v = np.divmod(np.arange(n * n, dtype=np.int64), n)
    keep = slice(None) if loops else (u != v)
    return Digraph.from_arcs(n, u[keep], v[keep])
