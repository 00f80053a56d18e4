"""System files and analysis reports.

A system file is JSON with matrices written as nested lists of
``[re, im]`` pairs::

    {"a": [[[0, 0], [1, 0]], [[-1, 0], [0, 0]]],
     "b": [[[0, 0]], [[1, 0]]],
     "flags": {"skew_adjoint": true}}

``c`` defaults to ``b*`` and ``d`` to zero. Reports are written with sorted
keys and every float printed with 17 significant digits, so identical runs
give identical bytes.
"""
from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

import numpy as np

from . import __version__
from .lti import StateSpaceSystem

__all__ = [
    "SystemFileError",
    "parse_system",
    "load_system",
    "system_to_dict",
    "dump_system",
    "matrix_to_pairs",
    "encode",
    "dumps",
    "inputs_digest",
    "make_report",
]


class SystemFileError(ValueError):
    """Malformed system description; the message names the line or field."""


def _parse_matrix(value, field: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise SystemFileError(f"field '{field}': expected a non-empty list of rows")
    rows = []
    width = None
    for i, row in enumerate(value):
        if not isinstance(row, list):
            raise SystemFileError(f"field '{field}[{i}]': expected a list of [re, im] pairs")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise SystemFileError(
                f"field '{field}[{i}]': row has {len(row)} entries, expected {width}"
            )
        parsed = []
        for j, entry in enumerate(row):
            where = f"{field}[{i}][{j}]"
            if (
                not isinstance(entry, list)
                or len(entry) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry)
            ):
                raise SystemFileError(f"field '{where}': expected a [re, im] pair of numbers")
            re, im = float(entry[0]), float(entry[1])
            if not (math.isfinite(re) and math.isfinite(im)):
                raise SystemFileError(f"field '{where}': entries must be finite")
            parsed.append(complex(re, im))
        rows.append(parsed)
    if width == 0:
        raise SystemFileError(f"field '{field}': rows are empty")
    return np.array(rows, dtype=np.complex128)


def parse_system(text: str) -> StateSpaceSystem:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SystemFileError(
            f"line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise SystemFileError("top level must be an object")
    unknown = set(doc) - {"a", "b", "c", "d", "flags"}
    if unknown:
        raise SystemFileError(f"unknown field(s): {', '.join(sorted(unknown))}")
    for required in ("a", "b"):
        if required not in doc:
            raise SystemFileError(f"field '{required}' is required")
    mats = {k: _parse_matrix(doc[k], k) for k in ("a", "b", "c", "d") if doc.get(k) is not None}
    flags = doc.get("flags", {}) or {}
    if not isinstance(flags, dict):
        raise SystemFileError("field 'flags': expected an object")
    skew = flags.get("skew_adjoint", False)
    if not isinstance(skew, bool):
        raise SystemFileError("field 'flags.skew_adjoint': expected true or false")
    try:
        return StateSpaceSystem(skew_adjoint=skew, **mats)
    except ValueError as exc:
        raise SystemFileError(str(exc)) from exc


def load_system(path) -> StateSpaceSystem:
    return parse_system(Path(path).read_text())


def matrix_to_pairs(matrix) -> list:
    arr = np.atleast_2d(np.asarray(matrix, dtype=np.complex128))
    return [[[float(z.real), float(z.imag)] for z in row] for row in arr]


def system_to_dict(system: StateSpaceSystem) -> dict:
    return {
        "a": matrix_to_pairs(system.a),
        "b": matrix_to_pairs(system.b),
        "c": matrix_to_pairs(system.c),
        "d": matrix_to_pairs(system.d),
        "flags": {"skew_adjoint": bool(system.skew_adjoint)},
    }


def dump_system(system: StateSpaceSystem) -> str:
    return dumps(system_to_dict(system)) + "\n"


def _format_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    text = "%.17g" % x
    if all(ch not in text for ch in ".en"):
        text += ".0"
    return text


def encode(obj):
    """Convert numpy values and complex numbers to plain JSON-ready types."""
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            if obj.ndim == 2:
                return matrix_to_pairs(obj)
            return [encode(complex(v)) for v in obj.reshape(-1)] if obj.ndim == 1 else encode(obj.tolist())
        return encode(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, compact separators, 17-digit floats."""
    obj = encode(obj)
    if isinstance(obj, dict):
        items = (f"{json.dumps(k)}:{dumps(v)}" for k, v in sorted(obj.items()))
        return "{" + ",".join(items) + "}"
    if isinstance(obj, list):
        return "[" + ",".join(dumps(v) for v in obj) + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _format_float(obj)
    return json.dumps(obj, ensure_ascii=True)


def inputs_digest(inputs: dict) -> str:
    return hashlib.sha256(dumps(inputs).encode("ascii")).hexdigest()


def make_report(command: str, inputs: dict, payload: dict) -> dict:
    return {
        "command": command,
        "inputs_digest": inputs_digest(inputs),
        "payload": payload,
        "tool_version": __version__,
    }
