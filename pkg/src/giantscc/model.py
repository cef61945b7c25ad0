"""Type distributions, kernel matrices and kernel functions.

A model is a finite type space with probabilities ``q`` and a nonnegative
``k x k`` matrix ``P``; an arc ``u -> v`` between vertices of types ``i`` and
``j`` is present with probability ``min(1, P[i, j] / n)``.  General kernels on
``[0, 1]`` enter through :func:`discretize_kernel`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

PROB_SUM_TOL = 1e-12


class ModelError(ValueError):
    """Invalid model parameters."""


@dataclass(frozen=True)
class TypeDistribution:
    """Probabilities ``q_i > 0`` over ``k`` labelled types.

    Probabilities must sum to one within ``1e-12``; they are then
    renormalized so the stored vector sums to one as closely as floating
    point permits.
    """

    probs: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        q = np.asarray(self.probs, dtype=float).ravel()
        if q.size < 1:
            raise ModelError("type distribution needs at least one type")
        for i, qi in enumerate(q):
            if not np.isfinite(qi) or qi <= 0.0:
                raise ModelError(f"q_{i + 1} not strictly positive (got {qi!r})")
        total = float(q.sum())
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise ModelError(f"probabilities sum to {total!r}, not 1")
        q = q / total
        q.setflags(write=False)
        labels = tuple(self.labels) if len(self.labels) else tuple(f"s{i + 1}" for i in range(q.size))
        if len(labels) != q.size:
            raise ModelError(f"{len(labels)} labels given for {q.size} types")
        object.__setattr__(self, "probs", q)
        object.__setattr__(self, "labels", labels)

    @property
    def k(self) -> int:
        return self.probs.size


@dataclass(frozen=True)
class KernelMatrix:
    """Nonnegative finite ``k x k`` rate matrix ``P``."""

    entries: np.ndarray

    def __post_init__(self):
        p = np.array(self.entries, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1] or p.shape[0] < 1:
            raise ModelError(f"kernel matrix must be square and non-empty, got shape {p.shape}")
        bad = np.argwhere(~np.isfinite(p) | (p < 0))
        if bad.size:
            i, j = bad[0]
            raise ModelError(f"p_{i + 1}{j + 1} must be finite and nonnegative (got {p[i, j]!r})")
        p.setflags(write=False)
        object.__setattr__(self, "entries", p)

    @property
    def k(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class Model:
    """A validated (Q, P) pair, independent of the vertex count."""

    dist: TypeDistribution
    kernel: KernelMatrix

    @property
    def k(self) -> int:
        return self.dist.k

    @property
    def q(self) -> np.ndarray:
        return self.dist.probs

    @property
    def p(self) -> np.ndarray:
        return self.kernel.entries

    def spec(self, n: int, counts: Optional[Sequence[int]] = None) -> "ModelSpec":
        """Bind a vertex count; ``counts`` overrides the deterministic apportionment."""
        return ModelSpec(self, n, None if counts is None else tuple(int(c) for c in counts))


@dataclass(frozen=True)
class ModelSpec:
    """A model together with ``n`` and the integer type counts ``n_1..n_k``."""

    model: Model
    n: int
    counts: Optional[tuple] = None

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise ModelError(f"n must be positive, got {self.n}")
        if self.counts is None:
            counts = tuple(int(c) for c in type_counts(self.model.dist, n))
        else:
            counts = tuple(self.counts)
            if len(counts) != self.model.k or sum(counts) != n:
                raise ModelError(f"type counts {counts} do not partition n={n} into {self.model.k} types")
        for i, c in enumerate(counts):
            if c < 1:
                raise ModelError(f"n={n} too small: type {i + 1} receives {c} vertices")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "counts", counts)

    @property
    def k(self) -> int:
        return self.model.k

    @property
    def q(self) -> np.ndarray:
        return self.model.q

    @property
    def p(self) -> np.ndarray:
        return self.model.p

    def type_of(self) -> np.ndarray:
        """Type index of every vertex; types occupy contiguous blocks."""
        return np.repeat(np.arange(self.k, dtype=np.int32), self.counts)

    def offsets(self) -> np.ndarray:
        """First vertex of each type block, plus ``n`` as a sentinel."""
        return np.concatenate(([0], np.cumsum(self.counts))).astype(np.int64)


def validate_model(dist: TypeDistribution, kernel: KernelMatrix) -> Model:
    """Check that ``dist`` and ``kernel`` fit together and return a :class:`Model`.

    Accepts raw sequences too: ``validate_model([0.5, 0.5], [[0, 4], [4, 0]])``.
    """
    if not isinstance(dist, TypeDistribution):
        dist = TypeDistribution(dist)
    if not isinstance(kernel, KernelMatrix):
        kernel = KernelMatrix(kernel)
    if dist.k != kernel.k:
        raise ModelError(f"dimension mismatch: {dist.k} types but {kernel.k}x{kernel.k} kernel")
    return Model(dist, kernel)


def type_counts(dist: TypeDistribution, n: int) -> np.ndarray:
    """Largest-remainder apportionment of ``n`` vertices to types.

    Quotas ``q_i * n`` are computed in exact rational arithmetic; leftover
    seats go to the largest remainders, ties to the lowest index.

    >>> type_counts(TypeDistribution([0.5, 0.5]), 101)
    array([51, 50])
    """
    if not isinstance(dist, TypeDistribution):
        dist = TypeDistribution(dist)
    n = int(n)
    if n < dist.k:
        raise ModelError(f"n={n} is smaller than the number of types k={dist.k}")
    weights = [Fraction(float(x)) for x in dist.probs]
    total = sum(weights)
    quotas = [w * n / total for w in weights]
    counts = [int(qt) for qt in quotas]  # floor, quotas are nonnegative
    leftover = n - sum(counts)
    order = sorted(range(len(quotas)), key=lambda i: (-(quotas[i] - counts[i]), i))
    for i in order[:leftover]:
        counts[i] += 1
    return np.array(counts, dtype=np.int64)


def iid_type_counts(dist: TypeDistribution, n: int, rng: np.random.Generator) -> np.ndarray:
    """Type counts from ``n`` i.i.d. draws of ``Q`` (multinomial)."""
    return rng.multinomial(int(n), dist.probs).astype(np.int64)


def mean_matrices(spec) -> tuple:
    """Offspring mean matrices of the forward and backward branching processes.

    ``M_X[i, j] = p_ij q_j`` and ``M_Y[i, j] = p_ji q_j``.  Accepts a
    :class:`Model` or :class:`ModelSpec`.
    """
    p, q = spec.p, spec.q
    mx = p * q[None, :]
    my = p.T * q[None, :]
    return mx, my


# --- general kernels on [0, 1] -------------------------------------------------


@dataclass(frozen=True)
class TypeMeasure:
    """Piecewise-constant probability density on ``[0, 1]``.

    ``breaks`` are the cell edges (``0 = b_0 < ... < b_r = 1``); ``weights``
    the probability mass of each cell.  The default is the uniform measure.
    """

    breaks: tuple = (0.0, 1.0)
    weights: tuple = (1.0,)

    def __post_init__(self):
        b = np.asarray(self.breaks, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if b.ndim != 1 or b.size < 2 or b[0] != 0.0 or b[-1] != 1.0 or np.any(np.diff(b) <= 0):
            raise ModelError("measure breaks must increase strictly from 0 to 1")
        if w.size != b.size - 1:
            raise ModelError(f"{w.size} cell weights for {b.size - 1} cells")
        if np.any(~np.isfinite(w)) or np.any(w < 0) or w.sum() <= 0:
            raise ModelError("measure weights must be nonnegative with positive total mass")
        object.__setattr__(self, "breaks", tuple(b))
        object.__setattr__(self, "weights", tuple(w / w.sum()))

    def quantile(self, u) -> np.ndarray:
        """Inverse CDF; the CDF is piecewise linear so interpolation is exact."""
        b = np.asarray(self.breaks)
        cdf = np.concatenate(([0.0], np.cumsum(self.weights)))
        cdf[-1] = 1.0
        # drop zero-mass cells so the CDF is strictly increasing where we invert it
        keep = np.concatenate(([True], np.diff(cdf) > 0))
        return np.interp(u, cdf[keep], b[keep])


@dataclass(frozen=True)
class KernelFunction:
    """A kernel ``kappa(s, t) >= 0`` on ``[0, 1]^2`` with a type measure.

    ``evaluator`` is called with broadcastable numpy arrays ``s`` and ``t``.
    """

    evaluator: Callable
    measure: TypeMeasure = field(default_factory=TypeMeasure)
    name: str = "custom"


def constant_kernel(c: float, measure: Optional[TypeMeasure] = None) -> KernelFunction:
    c = float(c)
    return KernelFunction(lambda s, t: np.full(np.broadcast(s, t).shape, c), measure or TypeMeasure(), f"constant {c}")


def product_kernel(a: float, measure: Optional[TypeMeasure] = None) -> KernelFunction:
    """``kappa(s, t) = a * s * t``."""
    a = float(a)
    return KernelFunction(lambda s, t: a * s * t, measure or TypeMeasure(), f"product {a}")


def piecewise_kernel(grid, breaks=None, measure: Optional[TypeMeasure] = None) -> KernelFunction:
    """Kernel constant on the cells of a rectangular grid over ``[0, 1]^2``.

    ``grid[a][b]`` is the value on ``cell_a x cell_b``; ``breaks`` are the
    common cell edges (equal-width cells by default).
    """
    g = np.array(grid, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ModelError(f"piecewise grid must be square, got shape {g.shape}")
    edges = np.linspace(0.0, 1.0, g.shape[0] + 1) if breaks is None else np.asarray(breaks, dtype=float)
    if edges.size != g.shape[0] + 1:
        raise ModelError(f"{edges.size} breaks for a {g.shape[0]}-cell grid")
    inner = edges[1:-1]

    def evaluate(s, t):
        a = np.searchsorted(inner, s, side="right")
        b = np.searchsorted(inner, t, side="right")
        return g[a, b]

    return KernelFunction(evaluate, measure or TypeMeasure(), "piecewise")


def discretize_kernel(kf: KernelFunction, k: int, m: int = 8) -> tuple:
    """Approximate a kernel function by a ``k``-type model.

    ``[0, 1]`` is cut into ``k`` bins of equal measure; ``p_ij`` is the
    average of ``kappa`` over ``bin_i x bin_j`` by a midpoint rule on an
    ``m x m`` subgrid (midpoints in measure, so sub-cells carry equal mass).

    Returns ``(TypeDistribution, KernelMatrix)``.
    """
    k, m = int(k), int(m)
    if k < 1 or m < 1:
        raise ModelError(f"need k >= 1 and m >= 1, got k={k}, m={m}")
    u = (np.arange(k * m) + 0.5) / (k * m)
    pts = kf.measure.quantile(u)
    s, t = pts[:, None], pts[None, :]
    vals = np.broadcast_to(np.asarray(kf.evaluator(s, t), dtype=float), (k * m, k * m))
    bad = np.argwhere(~np.isfinite(vals) | (vals < 0))
    if bad.size:
        a, b = bad[0]
        raise ModelError(f"kernel value {vals[a, b]!r} at (s, t) = ({pts[a]!r}, {pts[b]!r}) is not finite and nonnegative")
    p = vals.reshape(k, m, k, m).mean(axis=(1, 3))
    return TypeDistribution(np.full(k, 1.0 / k)), KernelMatrix(p)
