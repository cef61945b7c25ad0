import json
import subprocess
import sys

import pytest

from giantscc.cli import main
from giantscc.experiment import read_csv


@pytest.fixture
def files(tmp_path):
    (tmp_path / "karp.yaml").write_text("probs: [1.0]\nkernel: [[2.0]]\nn: 2000\n")
    (tmp_path / "prod.yaml").write_text("kernel_function: {kind: product, a: 4}\nk: 2\n")
    (tmp_path / "bad.yaml").write_text("probs: [0.0, 1.0]\nkernel: [[1, 1], [1, 1]]\n")
    (tmp_path / "crit.yaml").write_text("probs: [1.0]\nkernel: [[1.00000001]]\n")
    (tmp_path / "sweep.yaml").write_text(
        "model_file: karp.yaml\nn: [500, 1000]\ntrials: 2\nseed: 3\nomega: ln\n")
    return tmp_path


def test_solve(files, capsys):
    assert main(["solve", "--config", str(files / "karp.yaml")]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["rho_xy"] == pytest.approx(0.6349095705, abs=1e-9)
    assert doc["giant_fraction"] == doc["rho_xy"]
    assert doc["spectral_radius"] == pytest.approx(2.0)


def test_solve_config_error(files, capsys):
    assert main(["solve", "--config", str(files / "bad.yaml")]) == 1
    assert "q_1 not strictly positive" in capsys.readouterr().err


def test_solve_nonconvergence_exit_code(files):
    assert main(["solve", "--config", str(files / "crit.yaml")]) == 2


def test_missing_file_io_error(files):
    assert main(["solve", "--config", str(files / "nope.yaml")]) == 3


def test_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1


def test_sample_summary(files, capsys):
    assert main(["sample", "--config", str(files / "karp.yaml"), "--seed", "4"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["n"] == 2000 and doc["n1"] >= doc["n2"]
    assert sum(s * c for s, c in doc["spectrum"]) == 2000


def test_sample_exports(files, capsys):
    out = files / "arcs.txt"
    assert main(["sample", "--config", str(files / "karp.yaml"), "--n", "100", "--export", "arcs",
                 "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines == sorted(lines, key=lambda s: tuple(map(int, s.split())))
    assert main(["sample", "--config", str(files / "karp.yaml"), "--n", "100", "--export", "spectrum"]) == 0
    spec = [tuple(map(int, ln.split())) for ln in capsys.readouterr().out.splitlines()]
    assert sum(s * c for s, c in spec) == 100


def test_discretize(files, capsys):
    assert main(["discretize", "--config", str(files / "prod.yaml")]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert sum(doc["kernel"], []) == pytest.approx([0.25, 0.75, 0.75, 2.25])
    assert main(["discretize", "--config", str(files / "karp.yaml")]) == 1


def test_sweep_csv_deterministic(files):
    a, b = files / "a.csv", files / "b.csv"
    assert main(["sweep", "--config", str(files / "sweep.yaml"), "--out", str(a)]) == 0
    assert main(["sweep", "--config", str(files / "sweep.yaml"), "--out", str(b)]) == 0
    ra, rb = read_csv(a), read_csv(b)
    assert len(ra) == 4
    assert [r.__dict__ | {"wall_ms": 0} for r in ra] == [r.__dict__ | {"wall_ms": 0} for r in rb]


def test_sweep_overrides_and_json(files):
    out = files / "r.json"
    assert main(["sweep", "--config", str(files / "sweep.yaml"), "--format", "json", "--out", str(out),
                 "--seed", "11", "--omega", "4", "--workers", "1"]) == 0
    doc = json.loads(out.read_text())
    assert len(doc["records"]) == 4 and doc["irreducible"]


def test_sweep_bad_override(files):
    assert main(["sweep", "--config", str(files / "sweep.yaml"), "--omega", "0"]) == 1


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "giantscc", "solve", "--config", str(files / "karp.yaml")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["irreducible"] is True
