"""Command line entry point.

Exit codes: 0 success, 1 usage or config error, 2 numeric non-convergence,
3 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys

from .branching import ConvergenceError, giant_fraction
from .config import ConfigError, ExperimentConfig, load_experiment, load_model, parse_omega
from .experiment import CSV_HEADER, _fmt, emit_json, run_experiment
from .exploration import big_fraction, default_omega
from .generator import MemoryEstimateError, sample_digraph, write_arc_list
from .model import ModelError, discretize_kernel
from .scc import compute_scc, write_spectrum

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write(text: str, out) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_solve(args) -> int:
    src = load_model(args.config)
    rho, res = giant_fraction(src.model)
    doc = res.to_dict()
    doc["giant_fraction"] = rho
    _write(json.dumps(doc, indent=1) + "\n", args.out)
    return EXIT_OK


def cmd_sample(args) -> int:
    src = load_model(args.config)
    n = args.n if args.n is not None else src.n
    if n is None:
        raise ConfigError("no vertex count: pass --n or set 'n' in the model file", field="n")
    spec = src.model.spec(n)
    g = sample_digraph(spec, args.seed)
    if args.export == "arcs":
        if args.out:
            write_arc_list(g, args.out)
        else:
            for u, v in g.arcs():
                sys.stdout.write(f"{u} {v}\n")
        return EXIT_OK
    summary = compute_scc(g)
    if args.export == "spectrum":
        if args.out:
            write_spectrum(summary, args.out)
        else:
            for size, count in summary.spectrum():
                sys.stdout.write(f"{size} {count}\n")
        return EXIT_OK
    omega = parse_omega(args.omega)
    w = default_omega(n) if omega == "ln" else omega
    doc = {
        "n": n, "seed": args.seed, "arc_count": g.arc_count, "components": summary.count,
        "n1": summary.n1, "n2": summary.n2, "n1_frac": summary.n1 / n, "n2_frac": summary.n2 / n,
        "omega": w, "big_frac": big_fraction(g, w, seed=args.seed),
        "spectrum": [[s, c] for s, c in summary.spectrum()],
    }
    _write(json.dumps(doc, indent=1) + "\n", args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load_experiment(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.omega is not None:
        overrides["omega"] = parse_omega(args.omega)
    if args.format is not None:
        overrides["format"] = args.format
    if args.out is not None:
        overrides["out"] = args.out
    if overrides:
        cfg = ExperimentConfig(**{**cfg.__dict__, **overrides})
    out = cfg.out
    if cfg.format == "json":
        result = run_experiment(cfg)
        if out:
            emit_json(result.records, out, result)
        else:
            fh = sys.stdout
            json.dump({"records": [r.__dict__ for r in result.records],
                       "aggregates": [a.__dict__ for a in result.aggregates],
                       "failures": result.failures, "irreducible": result.irreducible,
                       "formula": result.formula}, fh, indent=1)
            fh.write("\n")
        return EXIT_OK
    # csv rows are streamed as trials complete
    fh = open(out, "w", newline="") if out else sys.stdout
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)

        def on_record(rec):
            writer.writerow([_fmt(getattr(rec, c)) for c in CSV_HEADER])
            fh.flush()

        result = run_experiment(cfg, on_record)
    finally:
        if out:
            fh.close()
    for a in result.aggregates:
        print(f"n={a.n} trials={a.trials} N1/n={a.mean_n1_frac:.5f}+-{a.std_n1_frac:.5f} "
              f"N2/n={a.mean_n2_frac:.5f} big={a.mean_big_frac:.5f} rho={a.analytic_rho:.5f} ({result.formula})",
              file=sys.stderr)
    for f in result.failures:
        print(f"failed trial n={f['n']} seed={f['seed']}: {f['error']}", file=sys.stderr)
    return EXIT_OK


def cmd_discretize(args) -> int:
    src = load_model(args.config)
    if src.kernel_function is None:
        raise ConfigError("model file has no kernel_function to discretize", field="kernel_function")
    k = args.k if args.k is not None else src.k
    dist, kernel = discretize_kernel(src.kernel_function, k, args.subgrid)
    doc = {"k": k, "probs": [float(x) for x in dist.probs], "kernel": kernel.entries.tolist()}
    _write(json.dumps(doc, indent=1) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="giantscc", description="Giant strongly connected component of inhomogeneous random digraphs")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="survival probabilities and predicted giant fraction")
    p.add_argument("--config", required=True, help="model file")
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sample", help="sample one digraph and summarize its components")
    p.add_argument("--config", required=True, help="model file")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--omega", default="ln")
    p.add_argument("--export", choices=["summary", "arcs", "spectrum"], default="summary")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("sweep", help="run a seeded experiment over an n grid")
    p.add_argument("--config", required=True, help="experiment config")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--workers", type=int)
    p.add_argument("--omega")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("discretize", help="discretize a kernel function to a k-type model")
    p.add_argument("--config", required=True, help="model file with a kernel_function")
    p.add_argument("--k", type=int)
    p.add_argument("--subgrid", type=int, default=8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_discretize)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (ConfigError, ModelError, MemoryEstimateError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
