"""Seeded Monte Carlo sweeps over ``n``.

Trial ``t`` at size ``n`` uses ``trial_seed(base_seed, n, t)``, a SplitMix64
mix::

    z = splitmix64(splitmix64(splitmix64(base_seed) ^ n) ^ t)

with the standard SplitMix64 finalizer (increment ``0x9E3779B97F4A7C15``,
multipliers ``0xBF58476D1CE4E5B9`` and ``0x94D049BB133111EB``, shifts
30/27/31).  All record columns except ``wall_ms`` are bit-reproducible.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Iterator

import numpy as np

from .branching import giant_fraction, is_irreducible
from .config import ExperimentConfig
from .exploration import big_fraction, default_omega
from .generator import sample_digraph
from .model import iid_type_counts
from .scc import compute_scc

log = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
CSV_HEADER = ["n", "seed", "arc_count", "n1", "n2", "n1_frac", "n2_frac", "big_frac", "analytic_rho", "wall_ms"]


def splitmix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def trial_seed(base_seed: int, n: int, t: int) -> int:
    z = splitmix64(int(base_seed) & MASK64)
    z = splitmix64(z ^ (int(n) & MASK64))
    return splitmix64(z ^ (int(t) & MASK64))


@dataclass(frozen=True)
class TrialRecord:
    n: int
    seed: int
    arc_count: int
    n1: int
    n2: int
    n1_frac: float
    n2_frac: float
    big_frac: float
    analytic_rho: float
    wall_ms: float


@dataclass(frozen=True)
class Aggregate:
    n: int
    trials: int
    mean_n1_frac: float
    std_n1_frac: float
    mean_n2_frac: float
    std_n2_frac: float
    mean_big_frac: float
    analytic_rho: float


@dataclass
class ExperimentResult:
    records: list
    aggregates: list
    failures: list
    irreducible: bool
    formula: str


def run_trial(model, n: int, seed: int, omega="ln", subsample=None, types="fixed", analytic_rho=float("nan")):
    """Sample one digraph and measure it."""
    start = time.perf_counter()
    if types == "iid":
        counts = iid_type_counts(model.dist, n, np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(2**32,))))
        spec = model.spec(n, counts)
    else:
        spec = model.spec(n)
    g = sample_digraph(spec, seed)
    summary = compute_scc(g)
    w = default_omega(n) if omega == "ln" else int(omega)
    big = big_fraction(g, w, subsample, seed=seed)
    wall = (time.perf_counter() - start) * 1e3
    return TrialRecord(n, seed, g.arc_count, summary.n1, summary.n2, summary.n1 / n, summary.n2 / n,
                       big, float(analytic_rho), wall)


def _trial_job(args):
    model, n, seed, omega, subsample, types, rho = args
    try:
        return run_trial(model, n, seed, omega, subsample, types, rho), None
    except Exception as err:  # recorded per trial, the sweep carries on
        return None, {"n": n, "seed": seed, "error": f"{type(err).__name__}: {err}"}


def iter_trials(config: ExperimentConfig, analytic_rho: float = float("nan")) -> Iterator[tuple]:
    """Yield ``(record_or_None, failure_or_None)`` in canonical (n, trial) order."""
    jobs = [(config.model, n, trial_seed(config.seed, n, t), config.omega, config.subsample, config.types,
             analytic_rho) for n in config.n_grid for t in range(config.trials)]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            yield from pool.map(_trial_job, jobs)
    else:
        yield from map(_trial_job, jobs)


def aggregate(records) -> list:
    by_n = {}
    for r in records:
        by_n.setdefault(r.n, []).append(r)
    out = []
    for n in sorted(by_n):
        rs = by_n[n]
        f1 = np.array([r.n1_frac for r in rs])
        f2 = np.array([r.n2_frac for r in rs])
        ddof = 1 if len(rs) > 1 else 0
        out.append(Aggregate(n, len(rs), float(f1.mean()), float(f1.std(ddof=ddof)), float(f2.mean()),
                             float(f2.std(ddof=ddof)), float(np.mean([r.big_frac for r in rs])), rs[0].analytic_rho))
    return out


def run_experiment(config: ExperimentConfig, on_record=None) -> ExperimentResult:
    """Run every trial of ``config``; ``on_record`` sees records as they complete."""
    # depends on (Q, P) only, not on n
    rho, _ = giant_fraction(config.model)
    irreducible = is_irreducible(config.model)
    records, failures = [], []
    for rec, fail in iter_trials(config, rho):
        if fail is not None:
            log.warning("trial failed: %s", fail)
            failures.append(fail)
            continue
        records.append(rec)
        if on_record is not None:
            on_record(rec)
    formula = "rho_XY" if irreducible else "max_m rho_m"
    return ExperimentResult(records, aggregate(records), failures, irreducible, formula)


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def emit_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in records:
            w.writerow([_fmt(getattr(r, c)) for c in CSV_HEADER])


def read_csv(path) -> list:
    types = {f.name: f.type for f in fields(TrialRecord)}
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(TrialRecord(**{c: (int(v) if types[c] == "int" else float(v)) for c, v in row.items()}))
    return out


def _json_float(x):
    return x if math.isfinite(x) else None


def emit_json(records, path, result: ExperimentResult = None) -> None:
    doc = {"records": [{k: (_json_float(v) if isinstance(v, float) else v) for k, v in asdict(r).items()}
                       for r in records]}
    if result is not None:
        doc["aggregates"] = [asdict(a) for a in result.aggregates]
        doc["failures"] = result.failures
        doc["irreducible"] = result.irreducible
        doc["formula"] = result.formula
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def read_json(path) -> list:
    with open(path) as fh:
        doc = json.load(fh)
    return [TrialRecord(**{k: (float("nan") if v is None else v) for k, v in r.items()}) for r in doc["records"]]


def emit(records, path, fmt="csv", result=None) -> None:
    if fmt == "json":
        emit_json(records, path, result)
    else:
        emit_csv(records, path)
