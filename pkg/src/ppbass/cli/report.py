"""JSON encoding of results and re-verification of emitted certificates.

Every certificate is a JSON object with a ``type`` field.  Feeding it to
:func:`verify_certificate` rebuilds the objects and re-checks the claim
through the library.
"""

from __future__ import annotations

import json
import math
from typing import Any

from ..chains import EqualSubgroups, EquivalentStep, StrictStep
from ..exactalg import Mat, Submodule, element_from_json, element_to_json
from ..fpmod import FpModule, ModMorphism
from ..ppcalc import (
    PointedModule,
    PpFormula,
    evaluate,
    freely_realizes,
    implies,
    pp_index,
    satisfies,
)

REPORT_VERSION = "1"


def number(v) -> Any:
    """Indices and orders: ints stay ints, ``∞`` becomes ``"inf"``."""
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return v


def read_number(v):
    return math.inf if v == "inf" else v


def encode_matrix(m: Mat) -> list:
    return [[element_to_json(a) for a in row] for row in m.rows]


def encode_vectors(rows) -> list:
    return [[element_to_json(a) for a in row] for row in rows]


def chain_certificate(c) -> dict:
    base = {"index": c.index, "upper": c.upper.to_json(), "lower": c.lower.to_json()}
    if isinstance(c, StrictStep):
        return {"type": "strict-step", **base, "witness": c.witness.to_json()}
    if isinstance(c, EquivalentStep):
        return {"type": "equivalent-step", **base}
    if isinstance(c, EqualSubgroups):
        return {"type": "equal-subgroups", **base, "module": c.module.to_json()}
    raise TypeError(f"not a chain certificate: {type(c).__name__}")


def path_certificate(path, matrices, label: str) -> dict:
    """``path`` is a list of pointed modules and ``matrices[i]`` maps ``path[i]`` onto ``path[i+1]``."""
    return {
        "type": "tuple-map",
        "label": label,
        "path": [p.to_json() for p in path],
        "matrices": [encode_matrix(m) for m in matrices],
    }


def _formula(data) -> PpFormula:
    return PpFormula.from_json(data)


def _verify_tuple_map(cert: dict) -> bool:
    path = [PointedModule.from_json(p) for p in cert["path"]]
    if len(path) != len(cert["matrices"]) + 1:
        return False
    for src, tgt, rows in zip(path, path[1:], cert["matrices"]):
        ring = src.ring
        m = Mat.from_rows([[element_from_json(ring, a) for a in r] for r in rows], ncols=src.module.num_gens)
        f = ModMorphism(src.module, tgt.module, m)  # raises unless well defined
        if tuple(f(a) for a in src.tuple) != tgt.tuple:
            return False
    return True


def verify_certificate(cert: dict) -> bool:
    kind = cert["type"]
    if kind == "strict-step":
        return StrictStep(
            cert["index"], _formula(cert["upper"]), _formula(cert["lower"]), PointedModule.from_json(cert["witness"])
        ).verify()
    if kind == "equivalent-step":
        return EquivalentStep(cert["index"], _formula(cert["upper"]), _formula(cert["lower"])).verify()
    if kind == "equal-subgroups":
        return EqualSubgroups(
            cert["index"], _formula(cert["upper"]), _formula(cert["lower"]), FpModule.from_json(cert["module"])
        ).verify()
    if kind == "implication":
        # the free realization of the premise satisfies the conclusion
        p = PointedModule.from_json(cert["realization"])
        phi, psi = _formula(cert["premise"]), _formula(cert["conclusion"])
        return freely_realizes(p, phi) and satisfies(p, psi) is not None
    if kind == "counterexample":
        p = PointedModule.from_json(cert["realization"])
        phi, psi = _formula(cert["premise"]), _formula(cert["conclusion"])
        return satisfies(p, phi) is not None and satisfies(p, psi) is None
    if kind == "free-realization":
        return freely_realizes(PointedModule.from_json(cert["realization"]), _formula(cert["formula"]))
    if kind == "evaluation":
        phi = _formula(cert["formula"])
        m = FpModule.from_json(cert["module"])
        ring = m.ring
        gens = [[element_from_json(ring, a) for a in r] for r in cert["generators"]]
        return evaluate(phi, m) == Submodule(ring, phi.arity * m.num_gens, gens)
    if kind == "satisfies":
        return satisfies(PointedModule.from_json(cert["pointed"]), _formula(cert["formula"])) is not None
    if kind == "tuple-map":
        try:
            return _verify_tuple_map(cert)
        except Exception:
            return False
    if kind == "pair-index":
        top, bottom = _formula(cert["top"]), _formula(cert["bottom"])
        if not implies(bottom, top):
            return False
        return number(pp_index(top, bottom, FpModule.from_json(cert["module"]))) == cert["value"]
    raise ValueError(f"unknown certificate type {kind!r}")


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def strip_timing(report: dict) -> dict:
    """A copy without ``timing`` fields, for comparisons."""
    if isinstance(report, dict):
        return {k: strip_timing(v) for k, v in report.items() if k != "timing"}
    if isinstance(report, list):
        return [strip_timing(v) for v in report]
    return report


def iter_certificates(report: dict):
    for task in report.get("tasks", []):
        yield from task.get("certificates", [])


__all__ = [
    "REPORT_VERSION",
    "chain_certificate",
    "dumps",
    "encode_matrix",
    "encode_vectors",
    "iter_certificates",
    "path_certificate",
    "number",
    "read_number",
    "strip_timing",
    "verify_certificate",
]
