"""JSON system files and deterministic report serialization.

A system file looks like::

    {
      "dimension": 3,
      "basis": ["X", "Y", "Z"],
      "brackets": [{"i": 0, "j": 1, "result": [0, 0, 1]}],
      "derivation": [[1, 0, 0], [0, -2, 0], [0, 0, -1]],
      "tolerances": {"jacobi": 1e-9}
    }

``brackets`` is sparse; a pair listed once as ``(i, j)`` implies the
opposite orientation. ``tolerances`` is optional.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import JacobiViolation, ParseError
from .lie_core import DEFAULT_JACOBI_TOL, DEFAULT_RANK_TOL, LieAlgebra, validate_jacobi
from .spectral import (DEFAULT_GRADING_TOL, DEFAULT_LEIBNIZ_TOL, DEFAULT_SEMISIMPLE_TOL,
                       DEFAULT_TOL_REALPART, Derivation, validate_leibniz)

DEFAULT_TOLERANCES = {
    "jacobi": DEFAULT_JACOBI_TOL,
    "leibniz": DEFAULT_LEIBNIZ_TOL,
    "realpart": DEFAULT_TOL_REALPART,
    "rank": DEFAULT_RANK_TOL,
    "grading": DEFAULT_GRADING_TOL,
    "semisimple": DEFAULT_SEMISIMPLE_TOL,
}


@dataclass
class SystemSpec:
    algebra: LieAlgebra
    derivation: Derivation
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    digest: str = ""


def _require(cond: bool, message: str, **where):
    if not cond:
        raise ParseError(message, **where)


def _number(x, where: str) -> float:
    _require(isinstance(x, (int, float)) and not isinstance(x, bool), "expected a number",
             location=where)
    _require(math.isfinite(x), "expected a finite number", location=where)
    return float(x)


def system_from_dict(data: Any, digest: str = "") -> SystemSpec:
    _require(isinstance(data, dict), "system file must hold a JSON object", location="$")
    for key in ("dimension", "brackets", "derivation"):
        _require(key in data, f"missing field '{key}'", location=f"$.{key}")
    n = data["dimension"]
    _require(isinstance(n, int) and not isinstance(n, bool) and n > 0,
             "dimension must be a positive integer", location="$.dimension")
    basis = data.get("basis", [f"e{i + 1}" for i in range(n)])
    _require(isinstance(basis, list) and len(basis) == n and all(isinstance(b, str) for b in basis),
             "basis must list one string per dimension", location="$.basis")
    brackets = data["brackets"]
    _require(isinstance(brackets, list), "brackets must be a list", location="$.brackets")
    triples = []
    for k, entry in enumerate(brackets):
        where = f"$.brackets[{k}]"
        _require(isinstance(entry, dict) and {"i", "j", "result"} <= set(entry),
                 "bracket entries need i, j and result", location=where)
        i, j, res = entry["i"], entry["j"], entry["result"]
        for name, idx in (("i", i), ("j", j)):
            _require(isinstance(idx, int) and not isinstance(idx, bool) and 0 <= idx < n,
                     "bracket index out of range", location=f"{where}.{name}", value=idx)
        _require(isinstance(res, list) and len(res) == n,
                 "result vector must have length dimension", location=f"{where}.result")
        triples.append((i, j, [_number(x, f"{where}.result[{m}]") for m, x in enumerate(res)]))
    D = data["derivation"]
    _require(isinstance(D, list) and len(D) == n and all(isinstance(r, list) and len(r) == n for r in D),
             "derivation must be a dimension x dimension matrix", location="$.derivation")
    D = [[_number(x, f"$.derivation[{r}][{c}]") for c, x in enumerate(row)] for r, row in enumerate(D)]
    tolerances = dict(DEFAULT_TOLERANCES)
    extra = data.get("tolerances", {})
    _require(isinstance(extra, dict), "tolerances must be an object", location="$.tolerances")
    for key, value in extra.items():
        _require(key in DEFAULT_TOLERANCES, f"unknown tolerance '{key}'", location=f"$.tolerances.{key}")
        tolerances[key] = _number(value, f"$.tolerances.{key}")
        _require(tolerances[key] > 0, "tolerances must be positive", location=f"$.tolerances.{key}")

    alg = LieAlgebra.from_brackets(n, triples, basis)
    report = validate_jacobi(alg, tolerances["jacobi"])
    if not report.passed:
        worst = report.failures[0]
        raise JacobiViolation(f"{worst['axiom']} fails", axiom=worst["axiom"],
                              indices=worst["indices"], residual=worst["residual"],
                              tol=tolerances["jacobi"])
    derivation = validate_leibniz(np.array(D), alg, tolerances["leibniz"])
    return SystemSpec(alg, derivation, tolerances, digest)


def load_system(path) -> SystemSpec:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}", location=str(path)) from None
    try:
        data = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"invalid JSON: {exc}", location=str(path)) from None
    return system_from_dict(data, "sha256:" + hashlib.sha256(raw).hexdigest())


def parse_system(path) -> tuple:
    """``(LieAlgebra, Derivation)`` from a validated system file."""
    spec = load_system(path)
    return spec.algebra, spec.derivation


def system_to_dict(alg: LieAlgebra, D, tolerances: dict | None = None) -> dict:
    M = D.matrix if isinstance(D, Derivation) else np.asarray(D, dtype=float)
    out = {
        "dimension": alg.dim,
        "basis": list(alg.basis_labels),
        "brackets": [{"i": i, "j": j, "result": [float(x) for x in r]}
                     for i, j, r in alg.sparse_brackets()],
        "derivation": [[float(x) for x in row] for row in M],
    }
    if tolerances:
        out["tolerances"] = {k: v for k, v in tolerances.items() if DEFAULT_TOLERANCES.get(k) != v}
        if not out["tolerances"]:
            del out["tolerances"]
    return out


# ---------------------------------------------------------------------------
# deterministic JSON
# ---------------------------------------------------------------------------

def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _emit(obj, indent: int, level: int, out: list):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        if math.isfinite(obj):
            out.append(format(obj, ".17g") if obj != int(obj) or abs(obj) >= 1e17
                       else format(obj, ".1f"))
        else:
            out.append(json.dumps("inf" if obj > 0 else "-inf" if obj < 0 else "nan"))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        if all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in obj):
            out.append("[")
            for k, x in enumerate(obj):
                if k:
                    out.append(", ")
                _emit(x, indent, level, out)
            out.append("]")
            return
        out.append("[\n")
        for k, x in enumerate(obj):
            out.append(pad)
            _emit(x, indent, level + 1, out)
            out.append(",\n" if k < len(obj) - 1 else "\n")
        out.append(end + "]")
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        keys = sorted(obj)
        for k, key in enumerate(keys):
            out.append(pad + json.dumps(key) + ": ")
            _emit(obj[key], indent, level + 1, out)
            out.append(",\n" if k < len(keys) - 1 else "\n")
        out.append(end + "}")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON with sorted keys and floats at 17 significant digits."""
    out: list = []
    _emit(_plain(obj), indent, 0, out)
    return "".join(out)
