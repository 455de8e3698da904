"""Descending chains of pp formulas and their stabilization.

A chain is produced stage by stage (from a template or an explicit list)
and only a verified prefix ``φ_0 ≥ φ_1 ≥ … ≥ φ_k`` is ever used.  Every
verdict comes with certificates that can be re-checked on their own.

Verdicts are bounded: ``StabilizesAt(i)`` means the steps from ``i`` up to
the bound are all equalities, ``StrictThrough(k)`` means the last step
before the bound ``k`` is still strict.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence, Union

from sympy import divisors

from .errors import NotDescending, NotDescendingIdeals, RingMismatch, Stabilized, StageOutOfRange
from .exactalg import Poly, RingDescriptor, ZZ
from .fpmod import FpModule, direct_sum
from .ppcalc import (
    PointedModule,
    PpFormula,
    divisibility,
    evaluate,
    find_morphism,
    free_realization,
    implies,
    kernel,
    project,
    satisfies,
)


# -- verdicts and certificates ---------------------------------------------------


@dataclass(frozen=True)
class StabilizesAt:
    index: int

    def __str__(self):
        return f"StabilizesAt({self.index})"


@dataclass(frozen=True)
class StrictThrough:
    bound: int

    def __str__(self):
        return f"StrictThrough({self.bound})"


Verdict = Union[StabilizesAt, StrictThrough]


@dataclass(frozen=True)
class StrictStep:
    """``witness`` satisfies ``upper`` but not ``lower``."""

    index: int
    upper: PpFormula
    lower: PpFormula
    witness: PointedModule

    strict = True

    def verify(self) -> bool:
        return satisfies(self.witness, self.upper) is not None and satisfies(self.witness, self.lower) is None


@dataclass(frozen=True)
class EquivalentStep:
    """``upper`` and ``lower`` are equivalent in every module."""

    index: int
    upper: PpFormula
    lower: PpFormula

    strict = False

    def verify(self) -> bool:
        return implies(self.upper, self.lower) and implies(self.lower, self.upper)


@dataclass(frozen=True)
class EqualSubgroups:
    """``upper`` and ``lower`` define the same subgroup of ``module``."""

    index: int
    upper: PpFormula
    lower: PpFormula
    module: FpModule

    strict = False

    def verify(self) -> bool:
        return evaluate(self.upper, self.module) == evaluate(self.lower, self.module)


Certificate = Union[StrictStep, EquivalentStep, EqualSubgroups]


@dataclass(frozen=True)
class DccReport:
    verdict: Verdict
    certificates: tuple
    bound: int
    module: Optional[FpModule] = None

    @property
    def stabilizes(self) -> bool:
        return isinstance(self.verdict, StabilizesAt)

    @property
    def strict_steps(self) -> list:
        return [c.index for c in self.certificates if c.strict]

    @property
    def witnesses(self) -> dict:
        """Stage index to the witness tuple of each strict step."""
        return {c.index: c.witness.tuple for c in self.certificates if c.strict}

    def verify(self) -> bool:
        return all(c.verify() for c in self.certificates) and _verdict(
            [c.strict for c in self.certificates], self.bound
        ) == self.verdict


def _verdict(strict: Sequence[bool], bound: int) -> Verdict:
    last = max((i for i, s in enumerate(strict) if s), default=None)
    if last is None:
        return StabilizesAt(0)
    if last == len(strict) - 1:
        return StrictThrough(bound)
    return StabilizesAt(last + 1)


# -- chains ------------------------------------------------------------------


class PpChain:
    """A stage-indexed family of pp formulas with a verified descending prefix."""

    def __init__(
        self,
        ring: RingDescriptor,
        arity: int,
        generator: Optional[Callable[[int], PpFormula]] = None,
        formulas: Optional[Sequence[PpFormula]] = None,
        template: Optional[str] = None,
        _materialized: tuple = (),
    ):
        if (generator is None) == (formulas is None):
            raise ValueError("give exactly one of generator and formulas")
        self.ring = ring
        self.arity = arity
        self.generator = generator
        self.formulas = tuple(formulas) if formulas is not None else None
        self.template = template
        self.materialized = _materialized

    @classmethod
    def from_list(cls, formulas: Sequence[PpFormula]) -> "PpChain":
        if not formulas:
            raise ValueError("empty chain")
        return cls(formulas[0].ring, formulas[0].arity, formulas=formulas)

    @classmethod
    def from_template(cls, text: str, ring: RingDescriptor = ZZ, variables: Optional[Sequence[str]] = None) -> "PpChain":
        from .cli.dsl import parse_template

        gen, arity = parse_template(text, ring, variables)
        return cls(ring, arity, generator=gen, template=text)

    @property
    def length(self) -> Optional[int]:
        """Number of stages when the chain is an explicit list, else ``None``."""
        return None if self.formulas is None else len(self.formulas)

    def formula(self, i: int) -> PpFormula:
        if i < len(self.materialized):
            return self.materialized[i]
        if self.formulas is not None:
            if not 0 <= i < len(self.formulas):
                raise StageOutOfRange(f"stage {i} outside the chain of length {len(self.formulas)}")
            return self.formulas[i]
        if i < 0:
            raise StageOutOfRange(f"negative stage {i}")
        phi = self.generator(i)
        if phi.ring != self.ring:
            raise RingMismatch(f"stage {i} is over {phi.ring}, chain over {self.ring}")
        return phi

    def prefix(self, k: int) -> tuple:
        """``φ_0..φ_k``; requires the chain to be materialized through ``k``."""
        if k >= len(self.materialized):
            raise StageOutOfRange(f"chain is materialized only through stage {len(self.materialized) - 1}")
        return self.materialized[: k + 1]

    def __repr__(self):
        src = self.template or ("list" if self.formulas is not None else "generator")
        return f"PpChain({src!r}, ring={self.ring}, verified={len(self.materialized)})"


def materialize(chain: PpChain, k: int) -> PpChain:
    """Verify ``φ_{i+1} ≤ φ_i`` for ``i < k``; returns the chain with that prefix recorded."""
    done = list(chain.materialized)
    if not done:
        done.append(chain.formula(0))
    for i in range(len(done) - 1, k):
        nxt = chain.formula(i + 1)
        if nxt.arity != chain.arity:
            raise NotDescending(i, None)
        if not implies(nxt, done[i]):
            raise NotDescending(i, free_realization(nxt))
        done.append(nxt)
    return PpChain(
        chain.ring,
        chain.arity,
        generator=chain.generator,
        formulas=chain.formulas,
        template=chain.template,
        _materialized=tuple(done),
    )


def _ensure(chain: PpChain, k: int) -> PpChain:
    return chain if len(chain.materialized) > k else materialize(chain, k)


def lattice_strictness(chain: PpChain, k: int) -> DccReport:
    """Compare consecutive stages in the lattice of all pp formulas."""
    chain = _ensure(chain, k)
    phis = chain.prefix(k)
    certs = []
    for i in range(k):
        upper, lower = phis[i], phis[i + 1]
        if implies(upper, lower):
            certs.append(EquivalentStep(i, upper, lower))
        else:
            certs.append(StrictStep(i, upper, lower, free_realization(upper)))
    return DccReport(_verdict([c.strict for c in certs], k), tuple(certs), k)


def _split_tuple(module: FpModule, vec: Sequence, n: int) -> tuple:
    k = module.num_gens
    return tuple(module.elem(vec[j * k:(j + 1) * k]) for j in range(n))


def stabilizes_in(chain: PpChain, module: FpModule, bound: int) -> DccReport:
    """Compare the subgroups ``φ_i(M)`` for ``i ≤ bound``."""
    if module.ring != chain.ring:
        raise RingMismatch(f"chain over {chain.ring}, module over {module.ring}")
    chain = _ensure(chain, bound)
    phis = chain.prefix(bound)
    groups = [evaluate(phi, module) for phi in phis]
    certs = []
    for i in range(bound):
        upper, lower = groups[i], groups[i + 1]
        if upper == lower:
            certs.append(EqualSubgroups(i, phis[i], phis[i + 1], module))
            continue
        vec = next(v for v in upper.basis if v not in lower)
        witness = PointedModule(module, _split_tuple(module, vec, chain.arity))
        certs.append(StrictStep(i, phis[i], phis[i + 1], witness))
    return DccReport(_verdict([c.strict for c in certs], bound), tuple(certs), bound, module)


# -- principal ideals --------------------------------------------------------------


def principal_ideal_chain(
    r: Union[Sequence, Callable[[int], object]], ring: RingDescriptor = ZZ, stages: Optional[int] = None
) -> PpChain:
    """The divisibility chain ``r_i | x`` for ``r_0 R ⊇ r_1 R ⊇ …``.

    ``r`` is a list, or a function of the stage together with ``stages``.
    """
    if callable(r):
        if stages is None:
            raise ValueError("stages is required when r is a function")
        r = [r(i) for i in range(stages + 1)]
    elems = [ring.coerce(a) if not isinstance(a, Poly) else a for a in r]
    for i in range(len(elems) - 1):
        if not ring.divides(elems[i], elems[i + 1]):
            raise NotDescendingIdeals(i)
    return PpChain.from_list([divisibility([[a]], ring) for a in elems])


@dataclass(frozen=True)
class PerfectProbeReport:
    ring: RingDescriptor
    exhaustive: bool
    chains_checked: int
    max_strict_steps: int
    step_limit: Optional[int]
    all_stabilize: bool
    evidence: Optional[DccReport] = None

    @property
    def message(self) -> str:
        if self.exhaustive:
            if self.all_stabilize:
                return (
                    f"all principal-ideal chains stabilize; steps ≤ {self.step_limit} (divisor count)"
                )
            return "a principal-ideal chain failed to stabilize within the divisor count"
        return f"principal-ideal chain strict through stage {self.evidence.bound}; bounded evidence only"


def _divisor_chains(n: int) -> list:
    """All strictly descending chains of ideals of ``Z/n``, as divisor sequences ``d_0 | d_1 | …``."""
    divs = divisors(n)
    out = []

    def extend(path):
        out.append(tuple(path))
        for d in divs:
            if d != path[-1] and d % path[-1] == 0:
                extend(path + [d])

    for d in divs:
        extend([d])
    return out


def perfect_probe(ring: RingDescriptor, stage_bound: int = 32) -> PerfectProbeReport:
    """Stabilization of principal-ideal chains.

    Over ``Z/n`` every principal ideal is ``dR`` for a divisor ``d`` of
    ``n`` and any descending chain of principal ideals compresses to a
    strictly descending one.  Each strictly descending chain is padded with
    repeats to ``d(n)`` steps and checked in the pp lattice, so the scan
    covers all chains.  Infinite rings get the bounded chain ``2^i`` (resp.
    ``x^i``).
    """
    if ring.is_finite:
        n = ring.modulus
        limit = len(divisors(n))
        checked, worst, ok = 0, 0, True
        for path in _divisor_chains(n):
            padded = list(path) + [path[-1]] * (limit + 1 - len(path))
            report = lattice_strictness(principal_ideal_chain(padded, ring), limit)
            steps = len(report.strict_steps)
            worst = max(worst, steps)
            ok &= report.stabilizes and steps == len(path) - 1 and steps <= limit
            checked += 1
        return PerfectProbeReport(ring, True, checked, worst, limit, ok)
    if ring.is_polynomial:
        x = Poly.monomial(1, ring.n)
        chain = principal_ideal_chain(lambda i: x**i, ring, stage_bound)
    else:
        chain = principal_ideal_chain(lambda i: 2**i, ring, stage_bound)
    report = lattice_strictness(chain, stage_bound)
    return PerfectProbeReport(
        ring, False, 1, len(report.strict_steps), None, report.stabilizes, report
    )


# -- kernels and projections -------------------------------------------------------


def split_kernel_projection(chain: PpChain, free_part: Iterable[int], k: Optional[int] = None):
    """Stagewise ``φ_i(0̄, ȳ)`` and ``∃ȳ φ_i(x̄, ȳ)`` where ``x̄`` are the ``free_part`` variables.

    Both chains are returned materialized (hence verified) through the same
    stage as the input.
    """
    free_part = sorted(set(free_part))
    if k is None:
        k = len(chain.materialized) - 1
    chain = _ensure(chain, k)
    phis = chain.prefix(k)
    kern = PpChain.from_list([kernel(phi, free_part) for phi in phis])
    proj = PpChain.from_list([project(phi, free_part) for phi in phis])
    return materialize(kern, k), materialize(proj, k)


@dataclass(frozen=True)
class StabilizationComparison:
    holds: bool
    chain_report: DccReport
    kernel_report: DccReport
    projection_report: DccReport


def ordered_stabilization_equivalence(
    chain: PpChain, module: FpModule, bound: int, free_part: Optional[Iterable[int]] = None
) -> StabilizationComparison:
    """Whether the chain stabilizes in ``module`` exactly when its kernel and projection chains do."""
    if module.ring != chain.ring:
        raise RingMismatch(f"chain over {chain.ring}, module over {module.ring}")
    if free_part is None:
        free_part = [0] if chain.arity else []
    chain = _ensure(chain, bound)
    kern, proj = split_kernel_projection(chain, free_part, bound)
    whole = stabilizes_in(chain, module, bound)
    rk = stabilizes_in(kern, module, bound)
    rp = stabilizes_in(proj, module, bound)
    holds = whole.stabilizes == (rk.stabilizes and rp.stabilizes)
    return StabilizationComparison(holds, whole, rk, rp)


# -- witness transfer -------------------------------------------------------------


@dataclass(frozen=True)
class TransferWitness:
    """``G = ⊕ G_i`` over the strict steps, with maps ``(G_i, ḡ_i) → (M, ā_i)``.

    ``source`` is the report in the given module, ``report`` the re-evaluation in ``G``.
    """

    stages: tuple
    realizations: tuple
    maps: tuple
    module: FpModule
    injections: tuple
    source: DccReport
    report: DccReport

    def verify(self) -> bool:
        for i, p, f in zip(self.stages, self.realizations, self.maps):
            if tuple(f(g) for g in p.tuple) != self.source.witnesses[i]:
                return False
        return (
            self.source.verify()
            and self.report.verify()
            and self.report.strict_steps == self.source.strict_steps
        )


def transfer_witness(chain: PpChain, module: FpModule, k: int) -> TransferWitness:
    """Move the strictness witnessed in ``module`` into a direct sum of free realizations."""
    source = stabilizes_in(chain, module, k)
    if source.stabilizes:
        raise Stabilized(f"chain stabilizes in the module ({source.verdict})")
    chain = _ensure(chain, k)
    stages, reals, maps = [], [], []
    for i, elems in source.witnesses.items():
        p = free_realization(chain.formula(i))
        f = find_morphism(p, PointedModule(module, elems))
        if f is None:
            raise RuntimeError(f"no morphism from the free realization at stage {i}")
        stages.append(i)
        reals.append(p)
        maps.append(f)
    total, inj = direct_sum(*[p.module for p in reals])
    report = stabilizes_in(chain, total, k)
    for i, p, emb in zip(stages, reals, inj):
        pushed = PointedModule(total, [emb(g) for g in p.tuple])
        if satisfies(pushed, chain.formula(i)) is None or satisfies(pushed, chain.formula(i + 1)) is not None:
            raise RuntimeError(f"stage {i} is not strict in the direct sum")
    if report.strict_steps != source.strict_steps:
        raise RuntimeError("strictness in the direct sum differs from the module")
    return TransferWitness(tuple(stages), tuple(reals), tuple(maps), total, tuple(inj), source, report)


def ideal_chains_of(n: int, length: int) -> Iterable[tuple]:
    """Every descending chain of ``length + 1`` principal ideals of ``Z/n`` (as divisors)."""
    divs = divisors(n)

    def extend(path):
        if len(path) == length + 1:
            yield tuple(path)
            return
        for d in divs:
            if d % path[-1] == 0:
                yield from extend(path + [d])

    for d in divs:
        yield from extend([d])


__all__ = [
    "DccReport",
    "EqualSubgroups",
    "EquivalentStep",
    "PerfectProbeReport",
    "PpChain",
    "StabilizationComparison",
    "StabilizesAt",
    "StrictStep",
    "StrictThrough",
    "TransferWitness",
    "ideal_chains_of",
    "lattice_strictness",
    "materialize",
    "ordered_stabilization_equivalence",
    "perfect_probe",
    "principal_ideal_chain",
    "split_kernel_projection",
    "stabilizes_in",
    "transfer_witness",
]
