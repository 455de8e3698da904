"""Finitely presented modules, their elements and morphisms.

Conventions: a module on ``k`` generators is ``R^k / Rel``.  Relations are
stored as rows (each a vector of length ``k``), elements as coordinate
vectors on the generators, and a morphism ``M -> N`` as a
``k_N x k_M`` matrix whose ``j``-th column is the image of generator ``j``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

from .errors import ModuleMismatch, NotInjective, NotWellDefined, RingMismatch, TooLarge
from .exactalg import (
    INFINITE,
    Mat,
    Poly,
    RingDescriptor,
    Submodule,
    element_from_json,
    element_to_json,
    invariant_factors,
    preimage,
)

#: Default cap on exhaustive element enumeration.
ENUMERATION_BOUND = 10**6


class FpModule:
    """``R^k`` modulo the submodule spanned by the relation rows."""

    def __init__(self, ring: RingDescriptor, num_gens: int, relations: Sequence[Sequence] = ()):
        self.ring = ring
        self.num_gens = num_gens
        # the presentation as given, before any normal form is taken
        self.given_relations = tuple(tuple(ring.reduce(a) for a in r) for r in relations)
        self.relation_submodule = Submodule(ring, num_gens, self.given_relations)

    @classmethod
    def free(cls, ring: RingDescriptor, k: int) -> "FpModule":
        return cls(ring, k)

    @classmethod
    def zero_module(cls, ring: RingDescriptor) -> "FpModule":
        return cls(ring, 0)

    @property
    def relations(self) -> Mat:
        """Canonical relation rows."""
        return Mat.from_rows(self.relation_submodule.basis, ncols=self.num_gens)

    def __eq__(self, other):
        if not isinstance(other, FpModule):
            return NotImplemented
        return self.num_gens == other.num_gens and self.relation_submodule == other.relation_submodule

    def __hash__(self):
        return hash((self.num_gens, self.relation_submodule))

    def __repr__(self):
        return f"FpModule({self.ring}, gens={self.num_gens}, relations={self.relations.tolist()})"

    # -- elements ------------------------------------------------------------

    def elem(self, coords: Sequence) -> "ModElem":
        return ModElem(self, coords)

    def gens(self) -> list:
        z, o = self.ring.zero, self.ring.one
        k = self.num_gens
        return [ModElem(self, [o if i == j else z for i in range(k)]) for j in range(k)]

    def zero(self) -> "ModElem":
        return ModElem(self, [self.ring.zero] * self.num_gens)

    # -- invariants ------------------------------------------------------------

    @cached_property
    def invariant_factors(self) -> tuple:
        """Non-unit Smith invariants of the (lifted) relation lattice; ``0`` marks a free summand."""
        rows = [row for _, row in self.relation_submodule.echelon_basis]
        base = self.ring if self.ring.is_polynomial else RingDescriptor("Z")
        diag = invariant_factors(Mat.from_rows(rows, ncols=self.num_gens), base) if rows else ()
        diag = list(diag) + [base.zero] * (self.num_gens - len(diag))
        return tuple(d for d in diag if not (d and base.is_unit(d)))

    def order(self):
        total = 1
        base = self.ring
        for d in self.invariant_factors:
            size = base.quotient_size(d)
            if size == INFINITE:
                return INFINITE
            total *= size
        return total

    def is_finite(self) -> bool:
        return self.order() != INFINITE

    def is_isomorphic(self, other: "FpModule") -> bool:
        if self.ring != other.ring:
            return False
        return sorted(map(_sort_key, self.invariant_factors)) == sorted(map(_sort_key, other.invariant_factors))

    # -- serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "ring": str(self.ring),
            "num_gens": self.num_gens,
            "relations": [[element_to_json(a) for a in row] for row in self.relation_submodule.basis],
        }

    @classmethod
    def from_json(cls, data: dict) -> "FpModule":
        ring = RingDescriptor.parse(data["ring"])
        rels = [[element_from_json(ring, a) for a in row] for row in data.get("relations", [])]
        return cls(ring, int(data["num_gens"]), rels)


def _sort_key(a):
    return (a.degree, a.coeffs) if isinstance(a, Poly) else (0, a)


class ModElem:
    """Element of an :class:`FpModule` held by its unique reduced coordinates."""

    __slots__ = ("module", "coords")

    def __init__(self, module: FpModule, coords: Sequence):
        self.module = module
        self.coords = module.relation_submodule.reduce(tuple(coords))

    def _same(self, other: "ModElem"):
        if not isinstance(other, ModElem) or other.module != self.module:
            raise ModuleMismatch("elements of different modules")

    def __eq__(self, other):
        if not isinstance(other, ModElem):
            return NotImplemented
        return self.module == other.module and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __add__(self, other: "ModElem") -> "ModElem":
        self._same(other)
        return ModElem(self.module, [a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other: "ModElem") -> "ModElem":
        self._same(other)
        return ModElem(self.module, [a - b for a, b in zip(self.coords, other.coords)])

    def __neg__(self) -> "ModElem":
        return ModElem(self.module, [-a for a in self.coords])

    def __rmul__(self, r) -> "ModElem":
        r = self.module.ring.coerce(r)
        return ModElem(self.module, [r * a for a in self.coords])

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __repr__(self):
        return f"ModElem({list(self.coords)})"


def elem_eq(a: ModElem, b: ModElem) -> bool:
    a._same(b)
    return a == b


def make_cyclic(ring: RingDescriptor, ideal_gens: Sequence = ()) -> FpModule:
    """``R / I`` on one generator; ``R / Rr`` for a single ``r``."""
    return FpModule(ring, 1, [(ring.coerce(g),) for g in ideal_gens])


def direct_sum(*modules: FpModule):
    """Block direct sum with its injections, ``(S, [inj_1, ...])``."""
    if not modules:
        raise ValueError("direct_sum needs at least one module")
    ring = modules[0].ring
    if any(m.ring != ring for m in modules):
        raise RingMismatch("direct sum of modules over different rings")
    total = sum(m.num_gens for m in modules)
    rels = []
    off = 0
    zero = ring.zero
    for m in modules:
        for row in m.relation_submodule.basis:
            rels.append((zero,) * off + tuple(row) + (zero,) * (total - off - m.num_gens))
        off += m.num_gens
    s = FpModule(ring, total, rels)
    injections = []
    off = 0
    for m in modules:
        cols = []
        for j in range(m.num_gens):
            col = [zero] * total
            col[off + j] = ring.one
            cols.append(col)
        injections.append(ModMorphism(m, s, Mat.from_columns(cols, nrows=total)))
        off += m.num_gens
    return s, injections


def direct_power(module: FpModule, times: int) -> FpModule:
    if times == 0:
        return FpModule.zero_module(module.ring)
    return direct_sum(*([module] * times))[0]


class ModMorphism:
    """A well-defined homomorphism between finitely presented modules."""

    def __init__(self, source: FpModule, target: FpModule, matrix: Mat):
        if source.ring != target.ring:
            raise RingMismatch("morphism between modules over different rings")
        if matrix.shape != (target.num_gens, source.num_gens):
            raise ModuleMismatch(
                f"matrix of shape {matrix.shape} for a map from {source.num_gens} to {target.num_gens} generators"
            )
        ring = source.ring
        self.source = source
        self.target = target
        self.matrix = matrix.map(ring.reduce)
        for row in source.relation_submodule.basis:
            image = self.matrix.apply(row)
            if image not in target.relation_submodule:
                raise NotWellDefined(row, image)

    @classmethod
    def identity(cls, module: FpModule) -> "ModMorphism":
        r = module.ring
        return cls(module, module, Mat.identity(module.num_gens, r.zero, r.one))

    def __call__(self, x: ModElem) -> ModElem:
        if x.module != self.source:
            raise ModuleMismatch("element is not in the source module")
        return ModElem(self.target, self.matrix.apply(x.coords))

    def __matmul__(self, other: "ModMorphism") -> "ModMorphism":
        """Composition ``self ∘ other``."""
        if other.target != self.source:
            raise ModuleMismatch("composition of non-composable morphisms")
        return ModMorphism(other.source, self.target, self.matrix @ other.matrix)

    def __eq__(self, other):
        if not isinstance(other, ModMorphism):
            return NotImplemented
        if (self.source, self.target) != (other.source, other.target):
            return False
        return all(self(g) == other(g) for g in self.source.gens())

    def __hash__(self):
        return hash((self.source, self.target))

    def kernel_lattice(self) -> Submodule:
        """Preimage in ``R^k_source`` of the target relations."""
        return preimage(self.source.ring, self.matrix, self.target.relation_submodule)

    def kernel_witness(self):
        """A coordinate vector of a nonzero kernel element, or ``None`` if injective."""
        rel = self.source.relation_submodule
        for v in self.kernel_lattice().basis:
            if v not in rel:
                return v
        return None

    def is_injective(self) -> bool:
        return self.kernel_witness() is None

    def __repr__(self):
        return f"ModMorphism({self.matrix.tolist()})"


@dataclass(frozen=True)
class Rejected:
    """A candidate morphism that sends ``relation`` outside the target relations."""

    relation: tuple
    image: tuple


def check_welldefined(source: FpModule, target: FpModule, matrix: Mat):
    """The morphism, or :class:`Rejected` carrying a violating relation row."""
    try:
        return ModMorphism(source, target, matrix)
    except NotWellDefined as exc:
        return Rejected(exc.relation, exc.image)


def is_pure_embedding(f: ModMorphism) -> bool:
    """Whether an injective ``f`` preserves the pp type of the generator tuple.

    The pp type of the generators of a finitely presented module determines
    the types of all its tuples, so comparing the canonical generators of
    the generator tuple before and after ``f`` decides purity.
    """
    from .ppcalc import PointedModule, canonical_generator, implies

    witness = f.kernel_witness()
    if witness is not None:
        raise NotInjective(witness)
    gens = f.source.gens()
    before = canonical_generator(PointedModule(f.source, gens))
    after = canonical_generator(PointedModule(f.target, [f(g) for g in gens]))
    return implies(before, after)


def enumerate_elements(module: FpModule, bound: int = ENUMERATION_BOUND) -> Iterator[ModElem]:
    """Every element exactly once; raises :class:`TooLarge` when infinite or above ``bound``."""
    order = module.order()
    if order == INFINITE or order > bound:
        raise TooLarge(f"module of order {order} exceeds the enumeration bound {bound}")
    return _enumerate(module)


def _enumerate(module: FpModule) -> Iterator[ModElem]:
    ring = module.ring
    pivots = {c: row[c] for c, row in module.relation_submodule.echelon_basis}
    ranges = []
    for c in range(module.num_gens):
        p = pivots[c]
        if ring.is_polynomial:
            ranges.append([Poly(cs, ring.n) for cs in itertools.product(range(ring.n), repeat=p.degree)])
        else:
            ranges.append(range(p))
    for coords in itertools.product(*ranges):
        yield ModElem(module, coords)


__all__ = [
    "ENUMERATION_BOUND",
    "FpModule",
    "ModElem",
    "ModMorphism",
    "Rejected",
    "check_welldefined",
    "direct_power",
    "direct_sum",
    "elem_eq",
    "enumerate_elements",
    "is_pure_embedding",
    "make_cyclic",
]
