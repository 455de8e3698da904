"""pp pairs, their indices, and bounded elementary-equivalence probes.

Two modules are elementarily equivalent iff every pp pair has the same
index in both.  Everything here is a finite probe of that criterion: a
verdict of ``IndistinguishableOn`` never claims equivalence.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence, Union

from .bass import BassSystem, IndexedFamily, PureFreeTruncation
from .errors import NotComparable, RingMismatch
from .exactalg import INFINITE, Mat, RingDescriptor
from .fpmod import FpModule
from .ppcalc import (
    PpFormula,
    annihilator,
    conj,
    cyc_formula,
    divisibility,
    implies,
    pp_index,
    pp_sum,
    simplify,
)


@dataclass(frozen=True)
class PpPair:
    """``φ / ψ`` with ``ψ ≤ φ`` checked at construction."""

    top: PpFormula
    bottom: PpFormula

    def __post_init__(self):
        if self.top.ring != self.bottom.ring:
            raise RingMismatch("pair of formulas over different rings")
        if not implies(self.bottom, self.top):
            raise NotComparable("the bottom formula does not imply the top one")

    @property
    def ring(self) -> RingDescriptor:
        return self.top.ring

    @property
    def arity(self) -> int:
        return self.top.arity

    def __str__(self):
        return f"({self.top}) / ({self.bottom})"


def pair_index(pair: PpPair, module: FpModule):
    if module.ring != pair.ring:
        raise RingMismatch(f"pair over {pair.ring}, module over {module.ring}")
    return pp_index(pair.top, pair.bottom, module)


@dataclass(frozen=True)
class InfiniteEvidence:
    """The pair opens in family member ``member``, so its index in the ω-power is infinite."""

    member: int

    def __str__(self):
        return f"InfiniteEvidence({self.member})"


@dataclass(frozen=True)
class ClosedThrough:
    """No member up to ``bound`` opens the pair."""

    bound: int

    def __str__(self):
        return f"ClosedThrough({self.bound})"


def pure_free_index(pair: PpPair, family, probe_bound: int = 10):
    """Index of the pair in ``⊕_A A^(ω)``: each summand contributes a factor 1 or ``∞``.

    ``family`` is a list of modules or an :class:`IndexedFamily`.
    """
    indexed = isinstance(family, IndexedFamily)
    members = family.members(probe_bound) if indexed else list(family)
    if not members:
        raise ValueError("empty family")
    for i, m in enumerate(members):
        if pair_index(pair, m) > 1:
            return InfiniteEvidence(i) if indexed else INFINITE
    if indexed and not family.is_finite:
        return ClosedThrough(probe_bound)
    return 1


@dataclass(frozen=True)
class StageValue:
    """An index computed on the colimit truncation at ``stage``."""

    value: Union[int, float]
    stage: int


Source = Union[FpModule, PureFreeTruncation, IndexedFamily, tuple]


@dataclass
class InvariantSignature:
    """Lazily computed pp indices of one module description.

    ``source`` is an :class:`FpModule`, a :class:`PureFreeTruncation`, an
    :class:`IndexedFamily` (read as the pure-free module on it), or a
    ``(BassSystem, stage)`` pair standing for the colimit truncated there.
    """

    source: object
    probe_bound: int = 10
    _cache: dict = field(default_factory=dict, repr=False)

    def value(self, pair: PpPair):
        if pair not in self._cache:
            self._cache[pair] = self._compute(pair)
        return self._cache[pair]

    def _compute(self, pair: PpPair):
        src = self.source
        if isinstance(src, FpModule):
            return pair_index(pair, src)
        if isinstance(src, PureFreeTruncation):
            return pair_index(pair, src.module)
        if isinstance(src, IndexedFamily):
            return pure_free_index(pair, src, self.probe_bound)
        if isinstance(src, tuple) and isinstance(src[0], BassSystem):
            system, stage = src
            return StageValue(pair_index(pair, system.stage_module(stage)), stage)
        raise TypeError(f"unsupported module description {type(src).__name__}")

    @property
    def ring(self) -> RingDescriptor:
        src = self.source
        if isinstance(src, FpModule):
            return src.ring
        if isinstance(src, PureFreeTruncation):
            return src.module.ring
        if isinstance(src, IndexedFamily):
            return src.member(0).ring
        return src[0].ring


def _plain(v):
    if isinstance(v, StageValue):
        return v.value
    if isinstance(v, InfiniteEvidence):
        return INFINITE
    return v


@dataclass(frozen=True)
class Distinguished:
    pair: PpPair
    left: object
    right: object


@dataclass(frozen=True)
class IndistinguishableOn:
    """Same index on every probed pair; a bounded statement only."""

    count: int


def elem_equiv_probe(left, right, pairs: Sequence[PpPair]):
    """The first pair on which the two descriptions have different indices."""
    sl = left if isinstance(left, InvariantSignature) else InvariantSignature(left)
    sr = right if isinstance(right, InvariantSignature) else InvariantSignature(right)
    if sl.ring != sr.ring:
        raise RingMismatch(f"{sl.ring} versus {sr.ring}")
    n = 0
    for pair in pairs:
        n += 1
        a, b = sl.value(pair), sr.value(pair)
        if _plain(a) != _plain(b):
            return Distinguished(pair, a, b)
    return IndistinguishableOn(n)


@dataclass(frozen=True)
class TransferEntry:
    pair: PpPair
    stage: Optional[int]
    stage_index: Union[int, float, None]
    member: Optional[int]
    member_index: Union[int, float, None]

    @property
    def violation(self) -> bool:
        return self.stage is not None and self.member is None


@dataclass(frozen=True)
class TransferReport:
    entries: tuple

    @property
    def violations(self) -> list:
        return [e for e in self.entries if e.violation]

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def opened(self) -> int:
        return sum(1 for e in self.entries if e.stage is not None)


def lemma8_transfer_check(family, system: BassSystem, pairs: Sequence[PpPair], stage_bound: int) -> TransferReport:
    """For each pair opening at some stage ``≤ stage_bound``, find a family member where it opens."""
    members = family.members(stage_bound) if isinstance(family, IndexedFamily) else list(family)
    entries = []
    for pair in pairs:
        stage = stage_val = None
        for s in range(min(stage_bound, system.last_stage) + 1):
            v = pair_index(pair, system.stage_module(s))
            if v > 1:
                stage, stage_val = s, v
                break
        member = member_val = None
        if stage is not None:
            for j, m in enumerate(members):
                v = pair_index(pair, m)
                if v > 1:
                    member, member_val = j, v
                    break
        entries.append(TransferEntry(pair, stage, stage_val, member, member_val))
    return TransferReport(tuple(entries))


# -- pair enumeration -------------------------------------------------------------


def _prelude(ring: RingDescriptor) -> list:
    top, two = PpFormula.top(ring), divisibility([[2]], ring)
    return [
        (top, two),
        (two, divisibility([[4]], ring)),
        (two, conj(two, annihilator(2, ring))),
        (top, PpFormula.zero(ring)),
    ]


class _Sampler:
    def __init__(self, ring: RingDescriptor, rng: random.Random, entry_bound: int, bound_max: int):
        self.ring = ring
        self.rng = rng
        self.entry_bound = entry_bound
        self.bound_max = bound_max

    def entry(self):
        return self.ring.coerce(self.rng.randint(0, self.entry_bound))

    def matrix(self, r: int, c: int) -> Mat:
        return Mat.from_rows([[self.entry() for _ in range(c)] for _ in range(r)], ncols=c)

    def base(self, n: int, budget: int) -> PpFormula:
        """A formula of arity ``n`` with at most ``budget`` bound variables."""
        shapes = ["generic", "annihilator"]
        if budget >= 1:
            shapes += ["divisibility", "cyc"]
        shape = self.rng.choice(shapes)
        ring = self.ring
        if shape == "annihilator":
            return PpFormula(ring, Mat.zeros(1, 0), self.matrix(1, n))
        if shape == "divisibility":
            l = self.rng.randint(1, min(budget, 2))
            return divisibility(self.matrix(n, l), ring)
        if shape == "cyc":
            a = [self.entry() for _ in range(n)]
            b = [self.entry() for _ in range(self.rng.randint(0, 2))]
            return cyc_formula(a, b, ring)
        l = self.rng.randint(0, budget)
        m = self.rng.randint(1, 2)
        return PpFormula(ring, self.matrix(m, l), self.matrix(m, n))

    def formula(self, n: int, budget: int) -> PpFormula:
        phi = self.base(n, budget)
        roll = self.rng.random()
        if roll < 0.2 and phi.bound < budget:
            other = self.base(n, budget - phi.bound)
            combo = conj(phi, other)
            if combo.bound <= budget:
                return combo
        elif roll < 0.35:
            combo = simplify(pp_sum(phi, self.base(n, budget)))
            if combo.bound <= budget:
                return combo
        return phi


def enumerate_pairs(
    ring: RingDescriptor,
    arity_max: int = 1,
    bound_vars_max: int = 2,
    entry_bound: int = 4,
    count: int = 100,
    seed: int = 0,
) -> Iterator[PpPair]:
    """A deterministic stream of ``count`` comparable pairs.

    Unary streams start with a few fixed pairs built from ``2|x``; the rest
    are random divisibility, annihilator, cyclic and generic formulas, with
    ``ψ = φ ∧ extra`` so that ``ψ ≤ φ`` holds by construction.  Both
    formulas keep at most ``bound_vars_max`` bound variables.
    """
    if count <= 0:
        return
    made = 0
    if arity_max >= 1:
        for top, bottom in _prelude(ring):
            yield PpPair(top, bottom)
            made += 1
            if made == count:
                return
    rng = random.Random(seed)
    sampler = _Sampler(ring, rng, entry_bound, bound_vars_max)
    while made < count:
        n = rng.randint(1, max(arity_max, 1))
        top = sampler.formula(n, bound_vars_max)
        extra = sampler.formula(n, bound_vars_max - top.bound)
        if rng.random() < 0.15:
            yield PpPair(top, top)
        else:
            yield PpPair(top, conj(top, extra))
        made += 1


def index_product(values: Sequence) -> Union[int, float]:
    """Product of indices with ``∞`` absorbing."""
    out = 1
    for v in values:
        if v == INFINITE:
            return INFINITE
        out *= v
    return out


__all__ = [
    "ClosedThrough",
    "Distinguished",
    "IndistinguishableOn",
    "InfiniteEvidence",
    "InvariantSignature",
    "PpPair",
    "StageValue",
    "TransferEntry",
    "TransferReport",
    "elem_equiv_probe",
    "enumerate_pairs",
    "index_product",
    "lemma8_transfer_check",
    "pair_index",
    "pure_free_index",
]
