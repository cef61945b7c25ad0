"""Survival probabilities of multi-type Poisson Galton-Watson processes.

The forward process has offspring means ``M_X[i, j] = p_ij q_j``, the
backward process ``M_Y[i, j] = p_ji q_j``.  With Poisson offspring the
extinction probabilities are the smallest solution of
``xi_i = exp(sum_j M[i, j] (xi_j - 1))``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .generator import Digraph
from .model import mean_matrices
from .scc import compute_scc

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 10**6
# classes with Perron root at or below this are treated as non-surviving
CRITICAL_MARGIN = 1e-10


class ConvergenceError(ArithmeticError):
    def __init__(self, message, last=None, residual=None, iterations=None):
        super().__init__(message)
        self.last = last
        self.residual = residual
        self.iterations = iterations


def support_digraph(m) -> Digraph:
    """Digraph on the index set with ``i -> j`` iff ``m[i, j] > 0`` (exact test)."""
    m = np.asarray(m)
    src, dst = np.nonzero(m > 0)
    return Digraph.from_arcs(m.shape[0], src, dst)


def type_digraph(spec) -> Digraph:
    """The digraph ``D_P`` on the ``k`` types."""
    return support_digraph(spec.p)


def is_irreducible(spec) -> bool:
    return compute_scc(type_digraph(spec)).count == 1


def _perron_irreducible(b: np.ndarray, tol: float, max_iter: int) -> float:
    """Perron root of an irreducible nonnegative block.

    Power iteration on ``b + c I`` keeps the iterate strictly positive and the
    shifted matrix primitive, so the Collatz-Wielandt bounds
    ``min (Bx)_i / x_i <= r <= max (Bx)_i / x_i`` close in on the root.
    """
    k = b.shape[0]
    if k == 1:
        return float(b[0, 0])
    rows = b.sum(axis=1)
    c = max(float(rows.max()), 1e-9)
    a = b + c * np.eye(k)
    x = np.ones(k) / k
    lo, hi = float(rows.min()), float(rows.max())
    for it in range(max_iter):
        y = a @ x
        ratio = y / x
        lo = max(lo, float(ratio.min()) - c)
        hi = min(hi, float(ratio.max()) - c)
        if hi - lo <= tol * max(1.0, abs(hi)):
            return 0.5 * (lo + hi)
        x = y / y.sum()
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} steps (bracket [{lo!r}, {hi!r}])",
        last=x, residual=hi - lo, iterations=max_iter,
    )


def spectral_radius(m, tol: float = 1e-13, max_iter: int = DEFAULT_MAX_ITER) -> float:
    """Perron root of a nonnegative matrix.

    The root is the largest Perron root over the irreducible diagonal blocks
    (one per strongly connected class of the support digraph); each block is
    handled by shifted power iteration.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"square matrix expected, got shape {m.shape}")
    if np.any(~np.isfinite(m)) or np.any(m < 0):
        raise ValueError("matrix must be finite and nonnegative")
    return max((r for _, r in class_radii(m, tol, max_iter)), default=0.0)


def class_radii(m, tol: float = 1e-13, max_iter: int = DEFAULT_MAX_ITER) -> list:
    """``(members, perron_root)`` for every class of the support digraph of ``m``."""
    m = np.asarray(m, dtype=float)
    summary = compute_scc(support_digraph(m))
    out = []
    for cid in range(summary.count):
        idx = summary.members(cid)
        out.append((idx, _perron_irreducible(m[np.ix_(idx, idx)], tol, max_iter)))
    return out


def _doomed_types(m: np.ndarray) -> np.ndarray:
    """Types whose process dies out almost surely.

    A type survives with positive probability iff it can reach (in the
    support digraph) a class with Perron root above one.
    """
    k = m.shape[0]
    alive = np.zeros(k, dtype=bool)
    for idx, r in class_radii(m):
        if r > 1.0 + CRITICAL_MARGIN:
            alive[idx] = True
    # propagate backwards along arcs: i -> j with j alive makes i alive
    support = m > 0
    changed = True
    while changed:
        grow = ~alive & (support[:, alive].any(axis=1))
        changed = bool(grow.any())
        alive |= grow
    return ~alive


def extinction_fixed_point(m, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                           start=None, check_monotone: bool = False, full_output: bool = False):
    """Smallest solution of ``xi = exp(M (xi - 1))`` in ``[0, 1]^k``.

    Iterates from ``start`` (zero vector by default) until the largest
    componentwise change is below ``tol``.  Types that cannot reach a
    supercritical class are fixed at 1 up front; the iteration would only
    approach that value sublinearly.

    With ``check_monotone`` each iterate is asserted to be nondecreasing and
    at most one (meaningful only for the default start).

    Returns ``xi``, or ``(xi, info)`` with ``full_output``, where ``info`` has
    ``iterations`` and ``residual``.
    """
    m = np.asarray(m, dtype=float)
    k = m.shape[0]
    doomed = _doomed_types(m)
    xi = np.zeros(k) if start is None else np.array(start, dtype=float)
    xi[doomed] = 1.0
    residual = 0.0
    it = 0
    if not doomed.all():
        for it in range(1, max_iter + 1):
            nxt = np.exp(m @ (xi - 1.0))
            nxt[doomed] = 1.0
            residual = float(np.max(np.abs(nxt - xi)))
            if check_monotone:
                assert np.all(nxt >= xi - 1e-15) and np.all(nxt <= 1.0), "extinction iterates not monotone"
            xi = nxt
            if residual < tol:
                break
        else:
            raise ConvergenceError(
                f"extinction iteration did not converge in {max_iter} steps (residual {residual:.3g})",
                last=xi, residual=residual, iterations=max_iter,
            )
    xi = np.minimum(xi, 1.0)
    if full_output:
        return xi, {"iterations": it, "residual": residual}
    return xi


@dataclass
class SurvivalResult:
    rho_x: np.ndarray
    rho_y: np.ndarray
    rho_xy: float
    q: np.ndarray
    spectral_radius: float
    irreducible: bool = True
    type_scc_rho: list = field(default_factory=list)  # [(type indices, rho_m)]
    iterations: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "rho_x": [float(x) for x in self.rho_x],
            "rho_y": [float(x) for x in self.rho_y],
            "rho_xy": float(self.rho_xy),
            "q": [float(x) for x in self.q],
            "spectral_radius": float(self.spectral_radius),
            "irreducible": bool(self.irreducible),
            "type_scc_rho": [{"types": [int(i) for i in idx], "rho": float(r)} for idx, r in self.type_scc_rho],
            "iterations": dict(self.iterations),
        }

    def to_json(self, **kw) -> str:
        # repr-precision floats round-trip exactly through json
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "SurvivalResult":
        return cls(
            rho_x=np.array(d["rho_x"]), rho_y=np.array(d["rho_y"]), rho_xy=d["rho_xy"], q=np.array(d["q"]),
            spectral_radius=d["spectral_radius"], irreducible=d["irreducible"],
            type_scc_rho=[(tuple(e["types"]), e["rho"]) for e in d["type_scc_rho"]],
            iterations=d["iterations"],
        )


def survival(spec, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> SurvivalResult:
    """Survival vectors of the forward and backward processes and ``rho_XY``."""
    mx, my = mean_matrices(spec)
    q = spec.q
    xi_x, info_x = extinction_fixed_point(mx, tol, max_iter, full_output=True)
    xi_y, info_y = extinction_fixed_point(my, tol, max_iter, full_output=True)
    rho_x, rho_y = 1.0 - xi_x, 1.0 - xi_y
    rho_xy = float(np.sum(rho_x * rho_y * q))
    classes = compute_scc(type_digraph(spec))
    type_rho = []
    for cid in range(classes.count):
        idx = classes.members(cid)
        type_rho.append((tuple(int(i) for i in idx), float(np.sum(rho_x[idx] * rho_y[idx] * q[idx]))))
    return SurvivalResult(
        rho_x=rho_x, rho_y=rho_y, rho_xy=rho_xy, q=np.array(q), spectral_radius=spectral_radius(mx),
        irreducible=classes.count == 1, type_scc_rho=type_rho,
        iterations={"x": info_x["iterations"], "y": info_y["iterations"],
                    "residual_x": info_x["residual"], "residual_y": info_y["residual"]},
    )


def giant_fraction(spec, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> tuple:
    """Predicted fraction of vertices in the largest strongly connected component.

    For irreducible ``P`` this is ``rho_XY``.  Otherwise survival is computed
    on the whole model and the sum ``rho_X rho_Y q`` is restricted to each
    class ``S_m`` of ``D_P``; the largest ``rho_m`` is returned.
    """
    res = survival(spec, tol, max_iter)
    if res.irreducible:
        return res.rho_xy, res
    return max(r for _, r in res.type_scc_rho), res


def simulate_survival(m, runs: int, rng: np.random.Generator, max_generations: int = 200,
                      max_population: int = 10**4) -> np.ndarray:
    """Monte Carlo survival frequency per starting type.

    A run counts as surviving if it is alive after ``max_generations`` or its
    population reaches ``max_population``.  Runs are simulated in parallel:
    the type-``j`` offspring of a generation with counts ``z`` is
    Poisson(``(z @ M)_j``).
    """
    m = np.asarray(m, dtype=float)
    k = m.shape[0]
    out = np.zeros(k)
    for s in range(k):
        z = np.zeros((runs, k), dtype=np.int64)
        z[:, s] = 1
        survived = np.zeros(runs, dtype=bool)
        active = np.ones(runs, dtype=bool)
        for _ in range(max_generations):
            if not active.any():
                break
            za = z[active]
            za = rng.poisson(za @ m)
            pop = za.sum(axis=1)
            big = pop >= max_population
            idx = np.flatnonzero(active)
            survived[idx[big]] = True
            z[idx] = za
            active[idx[big | (pop == 0)]] = False
        survived |= active
        out[s] = survived.mean()
    return out
