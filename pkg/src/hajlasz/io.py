"""Bit-exact load/save of spaces, functions, and exponents.

All numbers are serialized with 17 significant digits through a canonical
JSON writer (sorted keys, fixed separators), so save -> load -> save is
byte-identical and every report is diffable across runs.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .exponent import ExponentField
from .lebesgue import FunctionField
from .space import FiniteSpace, SpaceError

__all__ = [
    "InputError",
    "fmt_num",
    "dump_json",
    "save_space",
    "load_space",
    "save_function",
    "load_function",
    "save_exponent",
    "load_exponent",
]


class InputError(ValueError):
    """Malformed or inconsistent input file."""


def fmt_num(x: float) -> str:
    """Canonical decimal form with 17 significant digits."""
    return f"{float(x):.17g}"


def _render(obj) -> str:
    if isinstance(obj, dict):
        items = sorted(obj.items())
        return "{" + ", ".join(f"{json.dumps(k)}: {_render(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_render(v) for v in obj) + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_num(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dump_json(obj) -> str:
    """Canonical JSON text (sorted keys, 17-significant-digit floats)."""
    return _render(obj) + "\n"


def _read_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError(f"expected a JSON object in {path}")
    return data


def _require(data: dict, field: str, path) -> object:
    if field not in data:
        raise InputError(f"missing field {field!r} in {path}")
    return data[field]


def save_space(space: FiniteSpace, path) -> None:
    labels = list(space.label) if space.label is not None else [str(i) for i in range(space.n)]
    if space.coords is not None and space.snowflake_beta is not None:
        metric = {
            "coords": [list(row) for row in space.coords],
            "snowflake_beta": space.snowflake_beta,
        }
    else:
        metric = {"matrix": [list(row) for row in space.dist]}
    doc = {"points": labels, "metric": metric, "measure": list(space.weight)}
    Path(path).write_text(dump_json(doc), encoding="utf-8")


def load_space(path, quantize: int | None = None) -> FiniteSpace:
    """Read a space file; ``quantize`` optionally rounds distances to that
    many decimals at ingestion to stabilize radius deduplication."""
    data = _read_json(path)
    labels = _require(data, "points", path)
    metric = _require(data, "metric", path)
    measure = _require(data, "measure", path)
    if not isinstance(metric, dict):
        raise InputError(f"field 'metric' must be an object in {path}")
    try:
        weight = np.array(measure, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InputError(f"field 'measure' is not numeric in {path}") from exc
    coords = None
    beta = None
    if "matrix" in metric:
        try:
            dist = np.array(metric["matrix"], dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise InputError(f"field 'metric.matrix' is not numeric in {path}") from exc
    elif "coords" in metric:
        try:
            coords = np.atleast_2d(np.array(metric["coords"], dtype=np.float64))
        except (TypeError, ValueError) as exc:
            raise InputError(f"field 'metric.coords' is not numeric in {path}") from exc
        beta = float(metric.get("snowflake_beta", 1.0))
        if not beta >= 1.0:
            raise InputError(f"field 'metric.snowflake_beta' must be >= 1 in {path}")
        diff = coords[:, None, :] - coords[None, :, :]
        dist = np.sqrt(np.sum(diff * diff, axis=-1))
        if beta != 1.0:
            dist = dist**beta
    else:
        raise InputError(f"field 'metric' needs 'matrix' or 'coords' in {path}")
    if quantize is not None:
        dist = np.round(dist, int(quantize))
    if not isinstance(labels, list) or len(labels) != dist.shape[0]:
        raise InputError(f"field 'points' length does not match metric in {path}")
    try:
        return FiniteSpace(
            dist=dist,
            weight=weight,
            label=tuple(str(s) for s in labels),
            coords=coords,
            snowflake_beta=beta,
        )
    except SpaceError as exc:
        raise InputError(f"{exc} in {path}") from exc


def save_function(f: FunctionField, path) -> None:
    Path(path).write_text(dump_json({"values": list(f.values)}), encoding="utf-8")


def load_function(path, n: int | None = None) -> FunctionField:
    data = _read_json(path)
    values = _require(data, "values", path)
    try:
        arr = np.array(values, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InputError(f"field 'values' is not numeric in {path}") from exc
    if n is not None and arr.size != n:
        raise InputError(f"field 'values' has length {arr.size}, expected {n} in {path}")
    try:
        return FunctionField(arr)
    except ValueError as exc:
        raise InputError(f"{exc} in {path}") from exc


def save_exponent(p: ExponentField, path) -> None:
    doc = {"values": list(p.values), "basepoint": int(p.basepoint)}
    Path(path).write_text(dump_json(doc), encoding="utf-8")


def load_exponent(path, n: int | None = None) -> ExponentField:
    data = _read_json(path)
    values = _require(data, "values", path)
    basepoint = int(data.get("basepoint", 0))
    try:
        arr = np.array(values, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InputError(f"field 'values' is not numeric in {path}") from exc
    if n is not None and arr.size != n:
        raise InputError(f"field 'values' has length {arr.size}, expected {n} in {path}")
    try:
        return ExponentField(arr, basepoint=basepoint)
    except ValueError as exc:
        raise InputError(f"{exc} in {path}") from exc
