"""Module and family descriptions given on the command line or in scenarios.

    spec    := term ("+" term)*
    term    := "0" | "R" ["^" k] | "R/" cexpr | "R^" k "/" cexpr
    family  := "family:" spec        (cexpr may use the member index i)

``R/4 + R/2`` is ``R/4R ⊕ R/2R``; ``R^2/3`` is ``(R/3R)^2``.  A string
ending in ``.json`` names a file holding an ``FpModule`` presentation or a
``{"summands": [[presentation, multiplicity], ...]}`` pure-free truncation.
JSON objects of those two shapes are accepted directly as well.
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Union

from ..bass import IndexedFamily, PureFreeTruncation, pure_free_truncation
from ..errors import ParseError
from ..exactalg import RingDescriptor
from ..fpmod import FpModule, direct_sum, make_cyclic
from .dsl import parse_coefficient

_TERM = re.compile(r"^R(?:\^(\d+))?(?:/(.+))?$")

ModuleSource = Union[FpModule, PureFreeTruncation, IndexedFamily]


def _term(text: str, ring: RingDescriptor, stage) -> list:
    text = text.strip()
    if text == "0":
        return []
    m = _TERM.match(text.replace(" ", ""))
    if not m:
        raise ParseError(f"cannot read module term {text!r}", None, text)
    mult = int(m.group(1) or 1)
    gens = [] if m.group(2) is None else [parse_coefficient(m.group(2), ring, stage)]
    return [make_cyclic(ring, gens)] * mult


def _split_sum(text: str) -> list:
    """Split on top-level ``+`` only, so ``R/(x+1)`` stays one term."""
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "+" and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    return parts


def module_from_text(text: str, ring: RingDescriptor, stage=None) -> FpModule:
    summands = [m for part in _split_sum(text) for m in _term(part, ring, stage)]
    if not summands:
        return FpModule.zero_module(ring)
    if len(summands) == 1:
        return summands[0]
    return direct_sum(*summands)[0]


def module_from_json(data: dict, ring: RingDescriptor) -> ModuleSource:
    if "summands" in data:
        pairs = [(FpModule.from_json(m), int(k)) for m, k in data["summands"]]
        return pure_free_truncation(pairs, ring)
    m = FpModule.from_json({"ring": str(ring), **data})
    return m


def parse_module_spec(spec, ring: RingDescriptor) -> ModuleSource:
    """An :class:`FpModule`, :class:`PureFreeTruncation` or :class:`IndexedFamily`."""
    if isinstance(spec, dict):
        return module_from_json(spec, ring)
    text = spec.strip()
    if text.endswith(".json"):
        return module_from_json(json.loads(Path(text).read_text()), ring)
    if text.startswith("family:"):
        body = text[len("family:"):]
        module_from_text(body, ring, 0)  # fail early on a malformed spec
        return IndexedFamily(lambda i: module_from_text(body, ring, i), body)
    return module_from_text(text, ring)


def module_of(source: ModuleSource) -> FpModule:
    """The single module a source stands for; families have none."""
    if isinstance(source, FpModule):
        return source
    if isinstance(source, PureFreeTruncation):
        return source.module
    raise TypeError("a family does not name a single module")


__all__ = ["ModuleSource", "module_from_json", "module_from_text", "module_of", "parse_module_spec"]
