"""YAML model files and experiment configs.

Model file (inline matrix)::

    labels: [a, b]          # optional
    probs: [0.5, 0.5]
    kernel:
      - [0, 4]
      - [4, 0]

Model file (kernel function, discretized to ``k`` types)::

    kernel_function:
      kind: product         # constant (c) | product (a) | piecewise (grid, breaks)
      a: 4
    measure:                # optional, default uniform on [0, 1]
      breaks: [0, 0.5, 1]
      weights: [0.5, 0.5]
    k: 32
    subgrid: 8              # optional, default 8

Either form may carry ``n`` (default vertex count for ``sample``).

Experiment config::

    model: {probs: [1.0], kernel: [[2.0]]}   # or model_file: path
    n: [10000, 20000]        # strictly increasing
    trials: 5
    seed: 12345
    omega: ln                # or a positive integer
    subsample: null          # vertices sampled for big_frac; null = automatic
    types: fixed             # fixed (apportioned) | iid (multinomial counts)
    workers: 1
    out: results.csv         # optional
    format: csv              # csv | json
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

import yaml

from .model import (KernelMatrix, Model, ModelError, TypeDistribution, TypeMeasure, constant_kernel,
                    discretize_kernel, piecewise_kernel, product_kernel, validate_model)


class ConfigError(ValueError):
    def __init__(self, message, field=None, line=None, source=None):
        where = []
        if source:
            where.append(str(source))
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(f"field '{field}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.reason = message
        self.field = field
        self.line = line


class _Doc:
    """Parsed YAML plus its node tree, for line lookups by field path."""

    def __init__(self, text: str, source=None):
        self.source = source
        try:
            self.data = yaml.safe_load(text)
            self.root = yaml.compose(text)
        except yaml.MarkedYAMLError as err:
            mark = err.problem_mark
            raise ConfigError(str(err.problem), line=mark.line + 1 if mark else None, source=source) from None
        if self.data is None:
            self.data = {}
        if not isinstance(self.data, dict):
            raise ConfigError("top level must be a mapping", line=1, source=source)

    def line(self, path) -> Optional[int]:
        node = self.root
        best = node.start_mark.line + 1 if node is not None else None
        for key in path:
            if isinstance(node, yaml.MappingNode):
                nxt = None
                for k, v in node.value:
                    if k.value == key:
                        nxt = v
                        best = k.start_mark.line + 1
                        break
                node = nxt
            elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
                node = node.value[key]
                best = node.start_mark.line + 1
            else:
                break
            if node is None:
                break
        return best

    def error(self, message, path):
        return ConfigError(message, field=_fmt(path), line=self.line(path), source=self.source)


def _fmt(path) -> str:
    out = ""
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out


def _get(doc, data, path, key, kind, default=..., required=True):
    if key not in data or data[key] is None:
        if default is not ...:
            return default
        if required:
            raise doc.error("missing required field", path + [key])
        return None
    val = data[key]
    if kind is int:
        if isinstance(val, bool) or not isinstance(val, int):
            raise doc.error(f"expected an integer, got {val!r}", path + [key])
    elif kind is float:
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise doc.error(f"expected a number, got {val!r}", path + [key])
        val = float(val)
    elif kind is list and not isinstance(val, list):
        raise doc.error(f"expected a list, got {val!r}", path + [key])
    elif kind is dict and not isinstance(val, dict):
        raise doc.error(f"expected a mapping, got {val!r}", path + [key])
    elif kind is str and not isinstance(val, str):
        raise doc.error(f"expected a string, got {val!r}", path + [key])
    return val


def _number_list(doc, vals, path):
    for i, v in enumerate(vals):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise doc.error(f"expected a number, got {v!r}", path + [i])
    return [float(v) for v in vals]


@dataclass(frozen=True)
class ModelSource:
    model: Model
    n: Optional[int] = None
    kernel_function: object = None
    k: Optional[int] = None


def _model_from(doc: _Doc, data: dict, path: list) -> ModelSource:
    n = _get(doc, data, path, "n", int, required=False)
    try:
        if "kernel_function" in data:
            kf_data = _get(doc, data, path, "kernel_function", dict)
            kf_path = path + ["kernel_function"]
            kind = _get(doc, kf_data, kf_path, "kind", str)
            measure = None
            if "measure" in data:
                mpath = path + ["measure"]
                mdata = _get(doc, data, path, "measure", dict)
                breaks = _number_list(doc, _get(doc, mdata, mpath, "breaks", list), mpath + ["breaks"])
                weights = _number_list(doc, _get(doc, mdata, mpath, "weights", list), mpath + ["weights"])
                try:
                    measure = TypeMeasure(tuple(breaks), tuple(weights))
                except ModelError as err:
                    raise doc.error(str(err), mpath) from None
            if kind == "constant":
                kf = constant_kernel(_get(doc, kf_data, kf_path, "c", float), measure)
            elif kind == "product":
                kf = product_kernel(_get(doc, kf_data, kf_path, "a", float), measure)
            elif kind == "piecewise":
                grid = _get(doc, kf_data, kf_path, "grid", list)
                rows = [_number_list(doc, r if isinstance(r, list) else [r], kf_path + ["grid", i])
                        for i, r in enumerate(grid)]
                breaks = kf_data.get("breaks")
                if breaks is not None:
                    breaks = _number_list(doc, _get(doc, kf_data, kf_path, "breaks", list), kf_path + ["breaks"])
                kf = piecewise_kernel(rows, breaks, measure)
            else:
                raise doc.error(f"unknown kernel kind {kind!r} (constant, product, piecewise)", kf_path + ["kind"])
            k = _get(doc, data, path, "k", int)
            m = _get(doc, data, path, "subgrid", int, default=8)
            dist, kernel = discretize_kernel(kf, k, m)
            return ModelSource(validate_model(dist, kernel), n, kf, k)
        probs = _number_list(doc, _get(doc, data, path, "probs", list), path + ["probs"])
        rows = _get(doc, data, path, "kernel", list)
        kernel = []
        for i, r in enumerate(rows):
            if not isinstance(r, list):
                raise doc.error(f"kernel row must be a list, got {r!r}", path + ["kernel", i])
            kernel.append(_number_list(doc, r, path + ["kernel", i]))
        if any(len(r) != len(rows) for r in kernel):
            raise doc.error("kernel must be a square matrix", path + ["kernel"])
        labels = data.get("labels") or ()
        try:
            dist = TypeDistribution(probs, tuple(str(x) for x in labels))
        except ModelError as err:
            raise doc.error(str(err), path + ["probs"]) from None
        try:
            matrix = KernelMatrix(kernel)
        except ModelError as err:
            raise doc.error(str(err), path + ["kernel"]) from None
        return ModelSource(validate_model(dist, matrix), n)
    except ModelError as err:
        raise ConfigError(str(err), field=_fmt(path) or None, line=doc.line(path), source=doc.source) from None


def parse_model(text: str, source=None) -> ModelSource:
    doc = _Doc(text, source)
    return _model_from(doc, doc.data, [])


def load_model(path) -> ModelSource:
    with open(path) as fh:
        return parse_model(fh.read(), source=path)


@dataclass(frozen=True)
class ExperimentConfig:
    source: ModelSource
    n_grid: tuple
    trials: int
    seed: int = 0
    omega: object = "ln"  # "ln" or a positive int
    subsample: Optional[int] = None
    types: str = "fixed"
    workers: int = 1
    out: Optional[str] = None
    format: str = "csv"

    @property
    def model(self) -> Model:
        return self.source.model

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError(f"trials must be at least 1, got {self.trials}", field="trials")
        grid = tuple(int(n) for n in self.n_grid)
        if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError(f"n grid must be non-empty and strictly increasing, got {list(grid)}", field="n")
        if grid[0] < self.model.k:
            raise ConfigError(f"n={grid[0]} is smaller than k={self.model.k}", field="n")
        if not (self.omega == "ln" or (isinstance(self.omega, int) and self.omega >= 1)):
            raise ConfigError(f"omega must be 'ln' or a positive integer, got {self.omega!r}", field="omega")
        if self.types not in ("fixed", "iid"):
            raise ConfigError(f"types must be 'fixed' or 'iid', got {self.types!r}", field="types")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be 'csv' or 'json', got {self.format!r}", field="format")
        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}", field="workers")
        object.__setattr__(self, "n_grid", grid)


def parse_omega(value):
    """``'ln'`` or a positive integer (strings of digits accepted)."""
    if value == "ln":
        return "ln"
    try:
        val = int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"omega must be 'ln' or a positive integer, got {value!r}", field="omega") from None
    if val < 1 or isinstance(value, bool):
        raise ConfigError(f"omega must be 'ln' or a positive integer, got {value!r}", field="omega")
    return val


def parse_experiment(text: str, source=None) -> ExperimentConfig:
    doc = _Doc(text, source)
    data = doc.data
    if "model_file" in data:
        mpath = _get(doc, data, [], "model_file", str)
        if source is not None and not os.path.isabs(mpath):
            mpath = os.path.join(os.path.dirname(str(source)), mpath)
        try:
            model_source = load_model(mpath)
        except OSError as err:
            raise doc.error(f"cannot read model file: {err}", ["model_file"]) from None
    else:
        model_source = _model_from(doc, _get(doc, data, [], "model", dict), ["model"])
    grid = _get(doc, data, [], "n", list) if isinstance(data.get("n"), list) else [_get(doc, data, [], "n", int)]
    for i, n in enumerate(grid):
        if isinstance(n, bool) or not isinstance(n, int):
            raise doc.error(f"expected an integer, got {n!r}", ["n", i])
    fields = dict(
        n_grid=tuple(grid),
        trials=_get(doc, data, [], "trials", int),
        seed=_get(doc, data, [], "seed", int, default=0),
        subsample=_get(doc, data, [], "subsample", int, required=False),
        types=_get(doc, data, [], "types", str, default="fixed"),
        workers=_get(doc, data, [], "workers", int, default=1),
        out=_get(doc, data, [], "out", str, required=False),
        format=_get(doc, data, [], "format", str, default="csv"),
    )
    try:
        fields["omega"] = parse_omega(data.get("omega", "ln"))
        return ExperimentConfig(model_source, **fields)
    except ConfigError as err:
        raise doc.error(err.reason, [err.field]) from None


def load_experiment(path) -> ExperimentConfig:
    with open(path) as fh:
        return parse_experiment(fh.read(), source=path)
