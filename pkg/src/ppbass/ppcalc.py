"""Positive primitive formulas ``∃ȳ (A ȳ = B x̄)`` and their calculus.

Implication is decided through free realizations: ``φ ≤ ψ`` holds in
every module iff the distinguished tuple of a free realization of ``φ``
satisfies ``ψ``, which is one linear system over a finitely presented
module.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from .errors import ArityMismatch, BadIndex, ModuleMismatch, NotComparable, RingMismatch
from .exactalg import (
    Mat,
    RingDescriptor,
    Submodule,
    ZZ,
    block_diag,
    element_from_json,
    element_to_json,
    kron_identity,
    preimage,
    quotient_order,
    solve_linear,
)
from .fpmod import FpModule, ModElem, ModMorphism


@dataclass(frozen=True)
class PpFormula:
    """``∃ y_1..y_l (A ȳ = B x̄)`` with ``A`` of shape ``m x l`` and ``B`` of shape ``m x n``.

    Equality is syntactic (matrix equality); use :func:`equivalent` for
    semantic comparison.
    """

    ring: RingDescriptor
    A: Mat
    B: Mat

    def __post_init__(self):
        if self.A.nrows != self.B.nrows:
            raise ArityMismatch(f"A has {self.A.nrows} rows but B has {self.B.nrows}")
        object.__setattr__(self, "A", self.A.map(self.ring.reduce))
        object.__setattr__(self, "B", self.B.map(self.ring.reduce))

    @property
    def arity(self) -> int:
        return self.B.ncols

    @property
    def bound(self) -> int:
        return self.A.ncols

    @property
    def num_equations(self) -> int:
        return self.A.nrows

    @classmethod
    def from_rows(cls, ring: RingDescriptor, a_rows, b_rows, arity: int, bound: int) -> "PpFormula":
        return cls(ring, Mat.from_rows(a_rows, ncols=bound), Mat.from_rows(b_rows, ncols=arity))

    @classmethod
    def top(cls, ring: RingDescriptor, arity: int = 1) -> "PpFormula":
        return cls(ring, Mat.zeros(0, 0), Mat.zeros(0, arity))

    @classmethod
    def zero(cls, ring: RingDescriptor, arity: int = 1) -> "PpFormula":
        """``x̄ = 0``."""
        return cls(ring, Mat.zeros(arity, 0), Mat.identity(arity, ring.zero, ring.one))

    def to_json(self) -> dict:
        enc = lambda m: [[element_to_json(a) for a in row] for row in m.rows]  # noqa: E731
        return {"ring": str(self.ring), "arity": self.arity, "bound": self.bound, "A": enc(self.A), "B": enc(self.B)}

    @classmethod
    def from_json(cls, data: dict, ring: Optional[RingDescriptor] = None) -> "PpFormula":
        ring = ring or RingDescriptor.parse(data["ring"])
        dec = lambda rows: [[element_from_json(ring, a) for a in row] for row in rows]  # noqa: E731
        return cls.from_rows(ring, dec(data["A"]), dec(data["B"]), int(data["arity"]), int(data["bound"]))

    def __str__(self):
        from .cli.dsl import format_formula

        return format_formula(self)


@dataclass(frozen=True)
class PointedModule:
    """A finitely presented module with a distinguished tuple."""

    module: FpModule
    tuple: tuple

    def __init__(self, module: FpModule, elems: Sequence):
        elems = tuple(e if isinstance(e, ModElem) else module.elem(e) for e in elems)
        for e in elems:
            if e.module != module:
                raise ModuleMismatch("tuple entry from a different module")
        object.__setattr__(self, "module", module)
        object.__setattr__(self, "tuple", elems)

    @property
    def arity(self) -> int:
        return len(self.tuple)

    @property
    def ring(self) -> RingDescriptor:
        return self.module.ring

    def coords_matrix(self) -> Mat:
        """``n x k`` matrix whose row ``j`` holds the coordinates of entry ``j``."""
        return Mat.from_rows([e.coords for e in self.tuple], ncols=self.module.num_gens)

    def to_json(self) -> dict:
        return {
            "module": self.module.to_json(),
            "tuple": [[element_to_json(a) for a in e.coords] for e in self.tuple],
        }

    @classmethod
    def from_json(cls, data: dict) -> "PointedModule":
        m = FpModule.from_json(data["module"])
        return cls(m, [[element_from_json(m.ring, a) for a in c] for c in data["tuple"]])


# -- formula builders --------------------------------------------------------------


def _mat(ring: RingDescriptor, rows, ncols: Optional[int] = None) -> Mat:
    if isinstance(rows, Mat):
        return rows
    rows = [[ring.coerce(a) if not hasattr(a, "coeffs") else a for a in r] for r in rows]
    return Mat.from_rows(rows, ncols=ncols)


def divisibility(A, ring: RingDescriptor = ZZ) -> PpFormula:
    """``A | x̄``, i.e. ``∃ȳ (A ȳ = x̄)``; arity is the row count of ``A``."""
    a = _mat(ring, A)
    return PpFormula(ring, a, Mat.identity(a.nrows, ring.zero, ring.one))


def annihilator(r, ring: RingDescriptor = ZZ) -> PpFormula:
    """``r x = 0``."""
    return PpFormula(ring, Mat.zeros(1, 0), _mat(ring, [[r]]))


def cyc_formula(a_col: Sequence, b_col: Sequence, ring: RingDescriptor = ZZ) -> PpFormula:
    """``∃y (x̄ = ā y ∧ b̄ y = 0)``."""
    n = len(a_col)
    zero, one = ring.zero, ring.one
    a_rows = [[a] for a in a_col] + [[b] for b in b_col]
    b_rows = [[one if i == j else zero for j in range(n)] for i in range(n)]
    b_rows += [[zero] * n for _ in b_col]
    return PpFormula(ring, _mat(ring, a_rows, 1), _mat(ring, b_rows, n))


def cypr_formula(a_col: Sequence, r, ring: RingDescriptor = ZZ) -> PpFormula:
    """``∃y (x̄ = ā y ∧ r y = 0)``."""
    return cyc_formula(a_col, [r], ring)


def _same_shape(phi: PpFormula, psi: PpFormula):
    if phi.ring != psi.ring:
        raise RingMismatch(f"formulas over {phi.ring} and {psi.ring}")
    if phi.arity != psi.arity:
        raise ArityMismatch(f"arities {phi.arity} and {psi.arity}")


def conj(phi: PpFormula, psi: PpFormula) -> PpFormula:
    _same_shape(phi, psi)
    z = phi.ring.zero
    return PpFormula(phi.ring, block_diag([phi.A, psi.A], z), phi.B.vstack(psi.B))


def pp_sum(phi: PpFormula, psi: PpFormula) -> PpFormula:
    """``φ + ψ``: ``x̄ = x̄₁ + x̄₂`` with ``φ(x̄₁)`` and ``ψ(x̄₂)``; bound block is ``(x̄₁, ȳ_φ, ȳ_ψ)``."""
    _same_shape(phi, psi)
    ring = phi.ring
    z = ring.zero
    n, l1, l2 = phi.arity, phi.bound, psi.bound
    rows_a, rows_b = [], []
    for bphi, aphi in zip(phi.B.rows, phi.A.rows):
        rows_a.append(tuple(-b for b in bphi) + tuple(aphi) + (z,) * l2)
        rows_b.append((z,) * n)
    for bpsi, apsi in zip(psi.B.rows, psi.A.rows):
        rows_a.append(tuple(bpsi) + (z,) * l1 + tuple(apsi))
        rows_b.append(tuple(bpsi))
    return PpFormula(ring, Mat.from_rows(rows_a, ncols=n + l1 + l2), Mat.from_rows(rows_b, ncols=n))


def _check_indices(phi: PpFormula, idx: Iterable[int]) -> list:
    idx = sorted(set(idx))
    if any(not 0 <= i < phi.arity for i in idx):
        raise BadIndex(f"free variable index out of range 0..{phi.arity - 1}: {idx}")
    return idx


def project(phi: PpFormula, keep: Iterable[int]) -> PpFormula:
    """``∃`` over the free variables not in ``keep``; they are appended to the bound block."""
    keep = _check_indices(phi, keep)
    dropped = [j for j in range(phi.arity) if j not in keep]
    extra = phi.B.select_columns(dropped).map(lambda a: -a)
    return PpFormula(phi.ring, phi.A.hstack(extra), phi.B.select_columns(keep))


def kernel(phi: PpFormula, zeroed: Iterable[int]) -> PpFormula:
    """Substitute ``0`` for the free variables in ``zeroed``."""
    zeroed = _check_indices(phi, zeroed)
    rest = [j for j in range(phi.arity) if j not in zeroed]
    return PpFormula(phi.ring, phi.A, phi.B.select_columns(rest))


def substitute(phi: PpFormula, c: Mat) -> PpFormula:
    """``φ(C x̄)`` for an ``arity x n'`` matrix ``C``."""
    if c.nrows != phi.arity:
        raise ArityMismatch("substitution matrix has the wrong number of rows")
    return PpFormula(phi.ring, phi.A, phi.B @ c)


# -- free realizations ------------------------------------------------------------


def tietze_simplify(ring: RingDescriptor, num_gens: int, relations: Sequence[Sequence], tuple_coords: Sequence[Sequence]):
    """Eliminate generators that occur with a unit coefficient in some relation.

    Columns are scanned left to right, so earlier generators are eliminated
    first.  Returns ``(num_gens, relations, tuple_coords)`` presenting an
    isomorphic pointed module.
    """
    rels = [[ring.reduce(a) for a in r] for r in relations]
    coords = [[ring.reduce(a) for a in c] for c in tuple_coords]
    k = num_gens
    while True:
        hit = None
        for j in range(k):
            for ri, r in enumerate(rels):
                if r[j] and ring.is_unit(r[j]):
                    hit = (ri, j)
                    break
            if hit:
                break
        if hit is None:
            break
        ri, j = hit
        r = rels.pop(ri)
        inv = ring.unit_inverse(r[j])
        # g_j = -inv * sum_{i != j} r_i g_i
        subst = [ring.reduce(-inv * a) for i, a in enumerate(r) if i != j]

        def elim(v):
            vj = v[j]
            rest = v[:j] + v[j + 1:]
            if vj:
                rest = [ring.reduce(a + vj * s) for a, s in zip(rest, subst)]
            return rest

        rels = [elim(v) for v in rels]
        rels = [v for v in rels if any(v)]
        coords = [elim(c) for c in coords]
        k -= 1
    return k, rels, coords


def free_realization(phi: PpFormula, simplify: bool = True) -> PointedModule:
    """Generators ``(x̄, ȳ)`` with relations ``B x̄ - A ȳ = 0``; the tuple is ``x̄``."""
    ring = phi.ring
    n, l = phi.arity, phi.bound
    rels = [tuple(b) + tuple(-a for a in arow) for b, arow in zip(phi.B.rows, phi.A.rows)]
    coords = [[ring.one if i == j else ring.zero for i in range(n + l)] for j in range(n)]
    k = n + l
    if simplify:
        k, rels, coords = tietze_simplify(ring, k, rels, coords)
    module = FpModule(ring, k, rels)
    return PointedModule(module, coords)


def canonical_generator(p: PointedModule) -> PpFormula:
    """``∃ȳ (x̄ = G ȳ ∧ H ȳ = 0)``: generates the pp type of the tuple."""
    ring = p.ring
    n = p.arity
    g = p.coords_matrix()
    h = p.module.relations
    k = p.module.num_gens
    a = g.vstack(h) if h.nrows else g
    b = Mat.identity(n, ring.zero, ring.one).vstack(Mat.zeros(h.nrows, n, ring.zero))
    return PpFormula(ring, a if a.ncols == k else Mat.zeros(n + h.nrows, k), b)


@lru_cache(maxsize=None)
def _relation_power(module: FpModule, times: int) -> Submodule:
    k = module.num_gens
    z = module.ring.zero
    gens = []
    for s in range(times):
        for row in module.relation_submodule.basis:
            gens.append((z,) * (s * k) + tuple(row) + (z,) * ((times - s - 1) * k))
    return Submodule(module.ring, times * k, gens)


def _flatten(elems: Sequence[ModElem]) -> tuple:
    out = ()
    for e in elems:
        out += e.coords
    return out


def satisfies(p: PointedModule, phi: PpFormula, tiebreak: str = "first") -> Optional[tuple]:
    """A witness tuple ``ȳ`` (of :class:`ModElem`) for ``φ(ā)`` in the module, or ``None``."""
    if p.ring != phi.ring:
        raise RingMismatch(f"module over {p.ring}, formula over {phi.ring}")
    if p.arity != phi.arity:
        raise ArityMismatch(f"tuple of length {p.arity} for a formula of arity {phi.arity}")
    m = p.module
    k = m.num_gens
    z = m.ring.zero
    rhs = kron_identity(phi.B, k, z).apply(_flatten(p.tuple)) if phi.num_equations else ()
    lhs = kron_identity(phi.A, k, z)
    sol = solve_linear(lhs, rhs, _relation_power(m, phi.num_equations), m.ring, tiebreak)
    if sol is None:
        return None
    return tuple(m.elem(sol[s * k:(s + 1) * k]) for s in range(phi.bound))


def evaluate(phi: PpFormula, module: FpModule) -> Submodule:
    """``φ(M)`` as its preimage lattice in ``(R^k)^n`` (it contains ``Rel^n``).

    Tuple ``(a_1..a_n)`` corresponds to the concatenation of coordinate
    vectors; membership of a tuple is membership of that concatenation.
    """
    if module.ring != phi.ring:
        raise RingMismatch(f"module over {module.ring}, formula over {phi.ring}")
    ring = module.ring
    k = module.num_gens
    m, n = phi.num_equations, phi.arity
    z = ring.zero
    image = Submodule(
        ring,
        m * k,
        list(kron_identity(phi.A, k, z).columns()) + list(_relation_power(module, m).basis),
    )
    pre = preimage(ring, kron_identity(phi.B, k, z), image)
    return pre + _relation_power(module, n)


def tuple_vector(elems: Sequence[ModElem]) -> tuple:
    """Coordinates of a tuple, concatenated, as used by :func:`evaluate`."""
    return _flatten(elems)


def holds(phi: PpFormula, module: FpModule, elems: Sequence[ModElem]) -> bool:
    return satisfies(PointedModule(module, elems), phi) is not None


@lru_cache(maxsize=200_000)
def implies(phi: PpFormula, psi: PpFormula) -> bool:
    """``φ ≤ ψ``: ``φ(M) ⊆ ψ(M)`` in every module."""
    _same_shape(phi, psi)
    return satisfies(free_realization(phi), psi) is not None


def equivalent(phi: PpFormula, psi: PpFormula) -> bool:
    return implies(phi, psi) and implies(psi, phi)


def freely_realizes(p: PointedModule, phi: PpFormula) -> bool:
    """The tuple satisfies ``φ`` and ``φ`` generates its pp type."""
    if satisfies(p, phi) is None:
        return False
    return implies(phi, canonical_generator(p))


def pp_index(phi: PpFormula, psi: PpFormula, module: FpModule):
    """``|φ(M) / ψ(M)|`` for ``ψ ≤ φ``; ``math.inf`` when infinite."""
    if not implies(psi, phi):
        raise NotComparable("pp_index needs the second formula to imply the first")
    return quotient_order(evaluate(phi, module), evaluate(psi, module))


def find_morphism(source: PointedModule, target: PointedModule, tiebreak: str = "first") -> Optional[ModMorphism]:
    """A morphism of modules sending the source tuple onto the target tuple, or ``None``.

    The unknowns are the entries of the ``k_T x k_S`` matrix, column by
    column; conditions are ``X a_j = b_j`` and ``X rho = 0`` for each
    source relation ``rho``, all modulo the target relations.
    """
    if source.ring != target.ring:
        raise RingMismatch("pointed modules over different rings")
    if source.arity != target.arity:
        raise ArityMismatch("tuples of different lengths")
    ring = source.ring
    ks, kt = source.module.num_gens, target.module.num_gens
    z = ring.zero
    conditions = [(e.coords, t.coords) for e, t in zip(source.tuple, target.tuple)]
    conditions += [(rho, (z,) * kt) for rho in source.module.relation_submodule.basis]
    rows, rhs = [], []
    for v, b in conditions:
        for r in range(kt):
            row = [z] * (ks * kt)
            for c, a in enumerate(v):
                row[c * kt + r] = a
            rows.append(tuple(row))
        rhs.extend(b)
    lhs = Mat.from_rows(rows, ncols=ks * kt)
    sol = solve_linear(lhs, rhs, _relation_power(target.module, len(conditions)), ring, tiebreak)
    if sol is None:
        return None
    cols = [sol[c * kt:(c + 1) * kt] for c in range(ks)]
    return ModMorphism(source.module, target.module, Mat.from_columns(cols, nrows=kt))


def simplify(phi: PpFormula) -> PpFormula:
    """An equivalent formula read off the Tietze-reduced free realization."""
    return canonical_generator(free_realization(phi))


__all__ = [
    "PointedModule",
    "PpFormula",
    "annihilator",
    "canonical_generator",
    "conj",
    "cyc_formula",
    "cypr_formula",
    "divisibility",
    "equivalent",
    "evaluate",
    "find_morphism",
    "free_realization",
    "freely_realizes",
    "holds",
    "implies",
    "kernel",
    "pp_index",
    "pp_sum",
    "project",
    "satisfies",
    "simplify",
    "substitute",
    "tietze_simplify",
    "tuple_vector",
]
