"""Deterministic serialization for CLI reports.

Byte-identical output for identical inputs is a hard requirement, so
this module formats every float through one fixed code path instead of
leaning on json.dump: 17 significant digits, keys emitted in insertion
order, newline-terminated files. Rational charges travel as integer
pairs, complex entries as [re, im] pairs.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .linalg import fmt_float

__all__ = [
    "dumps",
    "csv_text",
    "complex_pair",
    "complex_matrix",
    "real_matrix",
    "write_text",
]


def _fmt_scalar(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if x is None:
        return "null"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x) or math.isinf(x):
            raise ValueError(f"non-finite value {x!r} in report")
        return fmt_float(x)
    if isinstance(x, str):
        return json.dumps(x, ensure_ascii=True)
    raise TypeError(f"cannot serialize {type(x).__name__} in report")


def dumps(obj, indent=0):
    """Render obj as JSON text with fixed float formatting and key order."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        parts = [
            f"{inner}{json.dumps(str(k))}: {dumps(v, indent + 1)}"
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        flat = all(not isinstance(v, (dict, list, tuple)) for v in obj)
        if flat:
            return "[" + ", ".join(_fmt_scalar(v) for v in obj) + "]"
        parts = [f"{inner}{dumps(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(parts) + "\n" + pad + "]"
    return _fmt_scalar(obj)


def csv_text(header, rows):
    """Render rows as CSV with the same float formatting as the JSON path."""
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, str):
                cells.append(cell)
            elif isinstance(cell, (bool, np.bool_)):
                cells.append("true" if cell else "false")
            elif isinstance(cell, (int, np.integer)):
                cells.append(str(int(cell)))
            else:
                cells.append(fmt_float(float(cell)))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def complex_pair(z):
    z = complex(z)
    return [float(z.real), float(z.imag)]


def complex_matrix(mat):
    return [[complex_pair(z) for z in row] for row in np.asarray(mat, dtype=complex)]


def real_matrix(mat):
    return [[float(x) for x in row] for row in np.asarray(mat, dtype=float)]


def write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
