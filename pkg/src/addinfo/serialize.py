"""JSON encodings and command-line input parsing.

Complex matrices are row-major arrays of ``[re, im]`` pairs. Rationals are
written as ``"p/q"`` strings; floats are rounded to 12 significant digits so
reports are stable across runs.
"""

from __future__ import annotations

import json
import os
from fractions import Fraction

import numpy as np

from ._validation import as_fraction
from .borel import IntervalSet
from .exceptions import SchemaError
from .functionals import Renyi, Shannon, SymmetricInformation, Zero, sym_from_json
from .linalg import (
    Projection,
    ProjectionPartition,
    SignedOperator,
    State,
    coordinate_partition,
    make_state,
    projection_partition,
    trivial_partition,
)
from .structure import BooleanStructure

__all__ = [
    "clean",
    "dumps",
    "format_number",
    "matrix_to_json",
    "matrix_from_json",
    "state_to_json",
    "parse_state",
    "parse_mu",
    "parse_partition",
    "parse_sym",
    "structure_to_json",
    "structure_from_json",
]

SIG_DIGITS = 12


def format_number(x: float) -> float:
    """Round to 12 significant digits; ``-0.0`` becomes ``0.0``."""
    x = float(f"{float(x):.{SIG_DIGITS}g}")
    return 0.0 if x == 0 else x


def clean(obj):
    """Recursively convert to JSON-ready values with stable number formatting."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        if not np.isfinite(obj):
            return str(float(obj))
        return format_number(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [format_number(obj.real), format_number(obj.imag)]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, IntervalSet):
        return obj.to_json()
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(clean(obj), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def matrix_to_json(m, exact: bool = False) -> list:
    """Row-major ``[re, im]`` pairs; ``exact`` keeps full float precision."""
    arr = np.asarray(getattr(m, "matrix", m), dtype=complex)
    fmt = (lambda x: float(x) + 0.0) if exact else format_number
    return [[[fmt(z.real), fmt(z.imag)] for z in row] for row in arr]


def matrix_from_json(data) -> np.ndarray:
    """Accept rows of ``[re, im]`` pairs or of plain numbers."""
    if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
        raise SchemaError("matrix must be a non-empty array of rows")
    rows = []
    for r in data:
        row = []
        for z in r:
            if isinstance(z, list):
                if len(z) != 2:
                    raise SchemaError(f"complex entry must be [re, im], got {z!r}")
                row.append(complex(_num(z[0]), _num(z[1])))
            else:
                row.append(complex(_num(z), 0.0))
        rows.append(row)
    if len({len(r) for r in rows}) != 1:
        raise SchemaError("matrix rows have different lengths")
    return np.array(rows, dtype=complex)


def _num(x) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float, str)):
        raise SchemaError(f"not a number: {x!r}")
    return float(as_fraction(x)) if isinstance(x, str) else float(x)


def state_to_json(rho: State):
    if rho.weights is not None:
        return {"diag": [str(w) for w in rho.weights]}
    return matrix_to_json(rho.matrix)


def _load(text: str):
    """JSON from an inline string or a file path."""
    if os.path.exists(text):
        with open(text, encoding="utf-8") as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None


def _diag_list(text: str) -> list:
    items = [t for t in text.split(",") if t.strip()]
    if not items:
        raise SchemaError("empty diagonal")
    return [as_fraction(t) for t in items]


def parse_state(text: str) -> State:
    """``diag:1/2,1/2``, ``{"diag": [...]}``, a matrix, or a file holding either."""
    if text.startswith("diag:"):
        return make_state(_diag_list(text[5:]))
    data = _load(text)
    if isinstance(data, dict):
        if "diag" not in data:
            raise SchemaError("state object needs a 'diag' field")
        return make_state(data["diag"])
    return State(matrix_from_json(data))


def parse_mu(text: str | None, dim: int) -> SignedOperator | None:
    if text is None or text == "zero":
        return None
    if text.startswith("diag:"):
        vals = _diag_list(text[5:])
        if len(vals) != dim:
            raise SchemaError(f"mu has {len(vals)} diagonal entries, state has dimension {dim}")
        return SignedOperator(np.diag([float(v) for v in vals]))
    data = _load(text)
    if data is None:
        return None
    return SignedOperator(matrix_from_json(data))


def parse_partition(text: str, dim: int) -> ProjectionPartition:
    """``coords``, ``identity``, ``{"coords": [[0], [1, 2]]}`` or an array of matrices."""
    if text == "coords":
        return coordinate_partition(dim)
    if text == "identity":
        return trivial_partition(dim)
    data = _load(text)
    if isinstance(data, dict):
        if "coords" not in data:
            raise SchemaError("partition object needs a 'coords' field")
        blocks = data["coords"]
        if not all(isinstance(b, list) and all(isinstance(i, int) for i in b) for b in blocks):
            raise SchemaError("'coords' must be an array of index arrays")
        if any(i < 0 or i >= dim for b in blocks for i in b):
            raise SchemaError(f"coordinate index out of range for dimension {dim}")
        return projection_partition([Projection.from_support(dim, b).matrix for b in blocks])
    if not isinstance(data, list):
        raise SchemaError("partition must be an array of matrices")
    return projection_partition([matrix_from_json(m) for m in data])


def parse_sym(text: str, alpha: float | None = None) -> SymmetricInformation:
    """``shannon``, ``zero``, ``renyi:<alpha>`` (or ``renyi`` with ``--alpha``), or JSON."""
    if text == "shannon":
        return Shannon()
    if text == "zero":
        return Zero()
    if text == "renyi" or text.startswith("renyi:"):
        raw = text[6:] if text.startswith("renyi:") else alpha
        if raw is None:
            raise SchemaError("renyi needs an order: renyi:<alpha> or --alpha")
        try:
            return Renyi(float(as_fraction(raw)) if isinstance(raw, str) else float(raw))
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"bad Renyi order {raw!r}: {exc}") from None
    return sym_from_json(_load(text))


def structure_to_json(B: BooleanStructure) -> dict:
    """Full-precision encoding; write it with :func:`json.dumps`, not :func:`dumps`."""
    state = {"diag": [str(w) for w in B.rho.weights]} if B.rho.weights is not None \
        else matrix_to_json(B.rho.matrix, exact=True)
    return {
        "state": state,
        "cells": [{"set": s.to_json(), "projection": matrix_to_json(p.matrix, exact=True)}
                  for s, p in B.cells],
    }


def structure_from_json(data) -> BooleanStructure:
    try:
        state = data["state"]
        rho = make_state(state["diag"]) if isinstance(state, dict) else State(matrix_from_json(state))
        cells = [(IntervalSet.from_json(c["set"]), Projection(matrix_from_json(c["projection"])))
                 for c in data["cells"]]
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"bad structure JSON: {exc}") from None
    return BooleanStructure(rho, cells)
