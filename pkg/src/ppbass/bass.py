"""Direct systems of free realizations along a descending pp chain.

Stage ``i`` is a free realization ``(A_i, ā_i)`` of ``φ_i``; the connector
``g_i : A_i → A_{i+1}`` sends ``ā_i`` to ``ā_{i+1}`` and exists because
``ā_{i+1}`` satisfies ``φ_{i+1} ≤ φ_i``.  Connectors are found by the linear
solver, so a system is one choice among many.

The colimit is never built.  Its elements are ``(stage, tuple)`` pairs and
questions about them are answered on a bounded truncation, with
``Unknown`` whenever the truncation cannot decide.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

from .chains import DccReport, PpChain, StrictThrough, lattice_strictness, materialize
from .errors import ArityMismatch, ChainStabilized, ModuleMismatch, StageOutOfRange
from .fpmod import FpModule, ModElem, direct_sum
from .ppcalc import PointedModule, PpFormula, find_morphism, free_realization, satisfies


@dataclass(frozen=True)
class Yes:
    stage: int

    def __str__(self):
        return f"Yes({self.stage})"


@dataclass(frozen=True)
class No:
    def __str__(self):
        return "No"


@dataclass(frozen=True)
class Unknown:
    def __str__(self):
        return "Unknown"


Answer = Union[Yes, No, Unknown]


@dataclass(frozen=True)
class BassSystem:
    chain: PpChain
    stages: tuple
    connectors: tuple
    tiebreak: str = "first"

    @property
    def last_stage(self) -> int:
        return len(self.stages) - 1

    @property
    def ring(self):
        return self.chain.ring

    def stage_module(self, i: int) -> FpModule:
        self._check_stage(i)
        return self.stages[i].module

    def _check_stage(self, i: int):
        if not 0 <= i <= self.last_stage:
            raise StageOutOfRange(f"stage {i} outside 0..{self.last_stage}")

    def element(self, stage: int, value) -> "ColimitElem":
        return ColimitElem(self, stage, value)

    def distinguished(self, stage: int) -> "ColimitElem":
        """The class of ``ā_stage``, i.e. ``f_stage(ā_stage)``."""
        self._check_stage(stage)
        return ColimitElem(self, stage, self.stages[stage].tuple)

    def verify(self) -> bool:
        """Every connector is well defined (by construction) and maps ``ā_i`` to ``ā_{i+1}`` exactly."""
        return all(
            tuple(g(a) for a in self.stages[i].tuple) == self.stages[i + 1].tuple
            for i, g in enumerate(self.connectors)
        )


def build_system(chain: PpChain, k: int, tiebreak: str = "first") -> BassSystem:
    """Stages ``0..k`` and the ``k`` connectors between them."""
    if len(chain.materialized) <= k:
        chain = materialize(chain, k)
    stages = tuple(free_realization(chain.formula(i)) for i in range(k + 1))
    connectors = []
    for i in range(k):
        g = find_morphism(stages[i], stages[i + 1], tiebreak)
        if g is None:
            raise RuntimeError(f"no connector from stage {i}; the chain prefix is not descending")
        connectors.append(g)
    return BassSystem(chain, stages, tuple(connectors), tiebreak)


class ColimitElem:
    """A tuple in ``A_stage`` standing for its image in the colimit."""

    __slots__ = ("system", "stage", "value")

    def __init__(self, system: BassSystem, stage: int, value):
        system._check_stage(stage)
        module = system.stages[stage].module
        if isinstance(value, ModElem):
            value = (value,)
        value = tuple(v if isinstance(v, ModElem) else module.elem(v) for v in value)
        if any(v.module != module for v in value):
            raise ModuleMismatch(f"value is not in the stage {stage} module")
        self.system = system
        self.stage = stage
        self.value = value

    def __repr__(self):
        return f"ColimitElem(stage={self.stage}, value={[list(v.coords) for v in self.value]})"


def push(e: ColimitElem, to_stage: int) -> ColimitElem:
    """Apply the connectors from ``e.stage`` to ``to_stage``."""
    system = e.system
    if to_stage < e.stage:
        raise StageOutOfRange(f"cannot push from stage {e.stage} back to {to_stage}")
    system._check_stage(to_stage)
    value = e.value
    for i in range(e.stage, to_stage):
        g = system.connectors[i]
        value = tuple(g(v) for v in value)
    return ColimitElem(system, to_stage, value)


def satisfies_upto(e: ColimitElem, phi: PpFormula, stage_bound: int) -> Answer:
    """``Yes(s)`` for the least ``s ≤ stage_bound`` where the pushed value satisfies ``φ``.

    Satisfaction persists along connectors, so ``Unknown`` never hides a
    ``No`` within the truncation; it only means no stage up to the bound
    witnessed it.
    """
    if phi.arity != len(e.value):
        raise ArityMismatch(f"formula of arity {phi.arity} for a tuple of length {len(e.value)}")
    e.system._check_stage(stage_bound)
    cur = e
    for s in range(e.stage, stage_bound + 1):
        if s > cur.stage:
            cur = push(cur, s)
        if satisfies(PointedModule(cur.system.stages[s].module, cur.value), phi) is not None:
            return Yes(s)
    return Unknown()


def colim_eq_upto(e1: ColimitElem, e2: ColimitElem, stage_bound: int) -> Answer:
    """Bounded equality in the colimit of the built truncation."""
    if e1.system is not e2.system:
        raise ModuleMismatch("elements of different systems")
    if len(e1.value) != len(e2.value):
        return No()
    system = e1.system
    system._check_stage(stage_bound)
    common = max(e1.stage, e2.stage)
    if common > stage_bound:
        return Unknown()
    a, b = push(e1, common), push(e2, common)
    first_values = (a.value, b.value)
    for s in range(common, stage_bound + 1):
        if s > common:
            a, b = push(a, s), push(b, s)
        if a.value == b.value:
            return Yes(s)
    if all(g.is_injective() for g in system.connectors[common:]):
        if first_values[0] != first_values[1]:
            return No()
    return Unknown()


@dataclass(frozen=True)
class MlFailureEvidence:
    """Bounded evidence that the pp type of ``f_0(ā_0)`` is not finitely generated.

    Records (a) ``f_0(ā_0) = f_i(ā_i)`` for ``i ≤ k``, (b) the stage at which
    that element is seen to satisfy each ``φ_i``, and (c) strict descent of
    the chain through ``k``.  This is evidence through stage ``k`` only, not
    a proof that the colimit fails the Mittag-Leffler condition.
    """

    bound: int
    equalities: tuple
    satisfaction: tuple
    strictness: DccReport

    @property
    def complete(self) -> bool:
        return (
            all(isinstance(a, Yes) for a in self.equalities)
            and all(isinstance(a, Yes) for a in self.satisfaction)
            and isinstance(self.strictness.verdict, StrictThrough)
        )

    @property
    def statement(self) -> str:
        return (
            f"evidence through stage {self.bound}: f_0(a_0) = f_i(a_i) and satisfies phi_i for all i <= "
            f"{self.bound}, and the chain is strict through {self.bound}; not a proof of Mittag-Leffler failure"
        )


def ml_failure_report(system: BassSystem, k: Optional[int] = None) -> MlFailureEvidence:
    k = system.last_stage if k is None else k
    if k < 2:
        raise ValueError("evidence needs at least two steps")
    system._check_stage(k)
    strictness = lattice_strictness(system.chain, k)
    if not isinstance(strictness.verdict, StrictThrough):
        raise ChainStabilized(strictness.verdict.index)
    base = system.distinguished(0)
    equalities = tuple(colim_eq_upto(base, system.distinguished(i), i) for i in range(k + 1))
    satisfaction = tuple(satisfies_upto(base, system.chain.formula(i), k) for i in range(k + 1))
    return MlFailureEvidence(k, equalities, satisfaction, strictness)


def colimit_truncation(system: BassSystem, stage: int) -> FpModule:
    """The colimit of the system cut off at ``stage``, which is ``A_stage``."""
    return system.stage_module(stage)


# -- pure-free modules -------------------------------------------------------------


@dataclass(frozen=True)
class PureFreeTruncation:
    """``⊕ A^(m)`` over the listed summands, presented as a block direct sum."""

    summands: tuple
    module: FpModule
    injections: tuple


def pure_free_truncation(summands: Sequence, ring=None) -> PureFreeTruncation:
    """``summands`` is a list of ``(FpModule, multiplicity)``."""
    copies = []
    for m, mult in summands:
        if mult < 1:
            raise ValueError("multiplicities must be positive")
        copies.extend([m] * mult)
    if not copies:
        if ring is None:
            from .exactalg import ZZ

            ring = ZZ
        return PureFreeTruncation((), FpModule.zero_module(ring), ())
    total, inj = direct_sum(*copies)
    return PureFreeTruncation(tuple((m, mult) for m, mult in summands), total, tuple(inj))


class IndexedFamily:
    """A possibly infinite family of modules, ``i ↦ A_i``, queried up to a bound."""

    def __init__(self, member: Callable[[int], FpModule], name: str = "", size: Optional[int] = None):
        self.member = member
        self.name = name
        self.size = size

    def __getitem__(self, i: int) -> FpModule:
        if self.size is not None and not 0 <= i < self.size:
            raise IndexError(i)
        return self.member(i)

    def members(self, bound: int) -> list:
        top = bound + 1 if self.size is None else min(bound + 1, self.size)
        return [self.member(i) for i in range(top)]

    @property
    def is_finite(self) -> bool:
        return self.size is not None

    def __repr__(self):
        return f"IndexedFamily({self.name or 'unnamed'})"

    @classmethod
    def of_system(cls, system: BassSystem) -> "IndexedFamily":
        return cls(system.stage_module, "stages", len(system.stages))


def connector_matrices(system: BassSystem) -> list:
    return [g.matrix for g in system.connectors]


__all__ = [
    "Answer",
    "BassSystem",
    "ColimitElem",
    "IndexedFamily",
    "MlFailureEvidence",
    "No",
    "PureFreeTruncation",
    "Unknown",
    "Yes",
    "build_system",
    "colim_eq_upto",
    "colimit_truncation",
    "connector_matrices",
    "ml_failure_report",
    "pure_free_truncation",
    "push",
    "satisfies_upto",
]
