"""
A reproducible sweep over n
===========================

The harness runs seeded trials over an n grid and writes one CSV row per
trial.  The same configuration always yields the same rows (apart from
wall-clock time).  The same sweep runs from the shell with
``giantscc sweep --config configs/sweep_karp.yaml``.
"""

import tempfile
from pathlib import Path

from giantscc.config import ExperimentConfig, ModelSource
from giantscc.experiment import emit_csv, run_experiment
from giantscc.model import validate_model

cfg = ExperimentConfig(ModelSource(validate_model([1.0], [[2.0]])), n_grid=(5_000, 20_000, 80_000), trials=4,
                       seed=2024)
res = run_experiment(cfg)
for a in res.aggregates:
    print(f"n={a.n:6d}  N1/n = {a.mean_n1_frac:.4f} +- {a.std_n1_frac:.4f}  "
          f"N2/n = {a.mean_n2_frac:.5f}  |B|/n = {a.mean_big_frac:.4f}  rho = {a.analytic_rho:.4f}")

out = Path(tempfile.mkdtemp()) / "sweep.csv"
emit_csv(res.records, out)
print(out.read_text().splitlines()[0])
