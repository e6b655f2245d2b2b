"""JSON encoding of scalars, matrices, regions, step functions and multipliers.

Rationals travel as ``"p/q"`` strings and flagged irrationals as
``{"approx": x, "label": name}``, so exactness survives a round trip.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .errors import BadInput, GaborError, ParseError
from .generators import Coeff, StepFunction
from .multipliers import PhaseFunction
from .numerics import Irrational, Mat2, as_scalar
from .regions import Box, Cell, Region

__all__ = ["SCHEMA_VERSION", "scalar_to_json", "scalar_from_json", "mat_to_json", "mat_from_json",
           "cell_to_json", "cell_from_json", "region_to_json", "region_from_json",
           "step_to_json", "step_from_json", "phase_to_json", "phase_from_json",
           "to_jsonable", "dumps", "loads", "load_file"]

SCHEMA_VERSION = "1.0"


def scalar_to_json(x):
    if isinstance(x, Irrational):
        return {"approx": x.approx, "label": x.label}
    if isinstance(x, (int, Fraction)):
        return str(Fraction(x))
    if isinstance(x, float):
        return x
    raise BadInput(f"cannot encode scalar {x!r}")


def scalar_from_json(v):
    return as_scalar(v)


def mat_to_json(M: Mat2):
    return [[scalar_to_json(x) for x in row] for row in M.rows]


def mat_from_json(v) -> Mat2:
    if not (isinstance(v, list) and len(v) == 2 and all(isinstance(r, list) and len(r) == 2 for r in v)):
        raise BadInput("a matrix is a 2x2 array of scalars")
    return Mat2.of([[as_scalar(x) for x in r] for r in v])


def cell_to_json(c: Cell) -> dict:
    return {"shear": [["1", "0"], [str(c.shear), "1"]],
            "base": [scalar_to_json(t) for t in c.base.as_list()]}


def cell_from_json(v) -> Cell:
    try:
        sh = v.get("shear", [[1, 0], [0, 1]])
        S = mat_from_json(sh)
        if not (S.a == 1 and S.b == 0 and S.d == 1 and S.is_integer()):
            raise BadInput("cell shear must be [[1,0],[s,1]] with integer s")
        x0, x1, y0, y1 = (as_scalar(t) for t in v["base"])
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise BadInput(f"bad cell record {v!r}") from exc
    return Cell(Box.of(x0, x1, y0, y1), int(S.c))


def region_to_json(r: Region) -> list:
    return [cell_to_json(c) for c in r.cells]


def region_from_json(v) -> Region:
    if not isinstance(v, list):
        raise BadInput("a region is a list of cells")
    return Region(tuple(cell_from_json(c) for c in v))


def step_to_json(g: StepFunction) -> list:
    return [{"cell": cell_to_json(c), "mag2": scalar_to_json(k.mag2), "phase": scalar_to_json(k.phase)}
            for c, k in g.terms]


def step_from_json(v) -> StepFunction:
    if isinstance(v, dict):
        v = v.get("terms", v.get("g"))
    if not isinstance(v, list):
        raise BadInput("a step function is a list of {cell, mag2, phase} records")
    terms = []
    for t in v:
        try:
            terms.append((cell_from_json(t["cell"]),
                          Coeff.of(as_scalar(t["mag2"]), as_scalar(t.get("phase", "0")))))
        except (KeyError, TypeError) as exc:
            raise BadInput(f"bad term {t!r}") from exc
    return StepFunction.of(terms)


def phase_to_json(h: PhaseFunction) -> dict:
    out = {
        "window": region_to_json(h.window) if h.window is not None else None,
        "periodic": h.periodic,
        "cells": [{"cell": cell_to_json(c), "phase": scalar_to_json(ph), "mag2": scalar_to_json(m2)}
                  for c, ph, m2 in h.cells],
    }
    if h.character is not None:
        out["character"] = [scalar_to_json(c) for c in h.character]
    if h.witness is not None:
        out["witness"] = to_jsonable(h.witness)
    return out


def _phase(v):
    ph = as_scalar(v)
    return ph % 1 if isinstance(ph, Fraction) else ph


def phase_from_json(v) -> PhaseFunction:
    if not isinstance(v, dict):
        raise BadInput("a multiplier is a JSON object")
    try:
        cells = tuple((cell_from_json(c["cell"]), _phase(c["phase"]), as_scalar(c.get("mag2", "1")))
                      for c in v.get("cells", []))
    except (KeyError, TypeError) as exc:
        raise BadInput("bad multiplier cell record") from exc
    win = v.get("window")
    char = v.get("character")
    return PhaseFunction(cells, region_from_json(win) if win is not None else None,
                         bool(v.get("periodic", False)),
                         tuple(as_scalar(c) for c in char) if char is not None else None,
                         v.get("witness"))


def to_jsonable(obj):
    """Recursively convert package values into plain JSON data."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, (Fraction, Irrational)):
        return scalar_to_json(obj)
    if isinstance(obj, float):
        return obj
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, Mat2):
        return mat_to_json(obj)
    if isinstance(obj, Cell):
        return cell_to_json(obj)
    if isinstance(obj, Box):
        return [scalar_to_json(t) for t in obj.as_list()]
    if isinstance(obj, Region):
        return region_to_json(obj)
    if isinstance(obj, StepFunction):
        return step_to_json(obj)
    if isinstance(obj, PhaseFunction):
        return phase_to_json(obj)
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, dict):
        return {_key(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "item"):
        return obj.item()
    raise BadInput(f"cannot encode {type(obj).__name__}")


def _key(k) -> str:
    if isinstance(k, tuple):
        return ",".join(str(t) for t in k)
    return str(k)


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, fixed indentation."""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from exc


def load_file(path, kind: str):
    """Parse ``path`` as ``kind`` in {"step", "phase", "region", "raw"}."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    data = loads(text)
    try:
        if kind == "step":
            return step_from_json(data)
        if kind == "phase":
            return phase_from_json(data)
        if kind == "region":
            return region_from_json(data)
    except GaborError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc)) from exc
    return data
