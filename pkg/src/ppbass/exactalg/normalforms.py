"""Hermite/Smith normal forms and finitely generated submodule arithmetic.

Vectors are tuples.  A submodule of ``R^k`` is stored as the row-style
Hermite basis of its preimage lattice in ``D^k``, where ``D`` is the
underlying Euclidean domain; for ``Z/n`` that lattice contains ``n Z^k``
and the rows ``n e_c`` are kept internally but hidden from the canonical
form.  Most operations are a single echelon computation on an augmented
matrix whose rows with pivots in the trailing block span an intersection
with a coordinate subspace (kernels, preimages, projections).
"""

from __future__ import annotations

import math
from functools import cached_property
from typing import Iterable, Optional, Sequence

from ..errors import AmbientMismatch, DimensionMismatch, NotContained
from .matrix import Mat
from .rings import INFINITE, ZZ, RingDescriptor


def _norm_rows(ring: RingDescriptor, rows: Iterable[Sequence], ncols: int) -> list:
    out = []
    red = ring.reduce
    for r in rows:
        if len(r) != ncols:
            raise DimensionMismatch(f"vector of length {len(r)} in ambient rank {ncols}")
        r = [red(a) for a in r]
        if any(r):
            out.append(r)
    return out


def echelon(ring: RingDescriptor, rows: Iterable[Sequence], ncols: int) -> list:
    """Row Hermite form of the lattice spanned by ``rows`` (plus ``m D^k`` for modulus ``m``).

    Returns a list of ``(pivot_column, row)`` with pivot columns strictly
    increasing, pivots normalized and entries above each pivot reduced to
    the canonical residue system of that pivot.  Unique for the lattice.
    """
    m = ring.modulus
    work = _norm_rows(ring, rows, ncols)
    size = ring.size
    basis = []
    for c in range(ncols):
        cand, rest = [], []
        for r in work:
            (cand if r[c] else rest).append(r)
        if m:
            cand.append([0] * c + [m] + [0] * (ncols - c - 1))
        while len(cand) > 1:
            cand.sort(key=lambda r: size(r[c]))
            piv = cand[0]
            pc = piv[c]
            keep = [piv]
            for r in cand[1:]:
                q = r[c] // pc
                r = r[:c] + [a - q * b for a, b in zip(r[c:], piv[c:])]
                if m:
                    for j in range(c + 1, ncols):
                        r[j] %= m
                if r[c]:
                    keep.append(r)
                elif any(r):
                    rest.append(r)
            cand = keep
        if cand:
            piv = cand[0]
            u = ring.normal_unit(piv[c])
            if u != 1:
                piv = [a * u for a in piv]
                if m:
                    piv = [a % m if j > c else a for j, a in enumerate(piv)]
            basis.append((c, piv))
        work = rest
    for i, (ci, ri) in enumerate(basis):
        p = ri[ci]
        for j in range(i):
            cj, rj = basis[j]
            if rj[ci]:
                q = rj[ci] // p
                if q:
                    rj = rj[:ci] + [a - q * b for a, b in zip(rj[ci:], ri[ci:])]
                    if m:
                        rj = [a % m if k > cj else a for k, a in enumerate(rj)]
                    basis[j] = (cj, rj)
    return [(c, tuple(r)) for c, r in basis]


def _reduce_vector(ring: RingDescriptor, v: Sequence, basis: Sequence) -> list:
    v = [ring.reduce(a) for a in v]
    for c, row in basis:
        if v[c]:
            q = v[c] // row[c]
            if q:
                v = v[:c] + [a - q * b for a, b in zip(v[c:], row[c:])]
    if ring.modulus:
        v = [a % ring.modulus for a in v]
    return v


def _split_lower(basis: Sequence, split: int) -> list:
    """Rows of an echelon basis with pivot in the trailing block, restricted to it."""
    return [row[split:] for c, row in basis if c >= split]


class Submodule:
    """Finitely generated submodule of ``R^k`` with a unique canonical form.

    ``generators`` are given as vectors (the columns of :attr:`generators`).
    Equality and hashing go through the canonical form.
    """

    def __init__(self, ring: RingDescriptor, ambient_rank: int, generators: Iterable[Sequence] = ()):
        self.ring = ring
        self.ambient_rank = ambient_rank
        self._gens = tuple(tuple(ring.reduce(a) for a in g) for g in generators)
        for g in self._gens:
            if len(g) != ambient_rank:
                raise DimensionMismatch(f"generator of length {len(g)} in ambient rank {ambient_rank}")
        self._basis = tuple(echelon(ring, self._gens, ambient_rank))

    @classmethod
    def from_mat(cls, ring: RingDescriptor, m: Mat) -> "Submodule":
        return cls(ring, m.nrows, m.columns())

    @classmethod
    def full(cls, ring: RingDescriptor, k: int) -> "Submodule":
        return cls(ring, k, (tuple(ring.one if i == j else ring.zero for j in range(k)) for i in range(k)))

    @classmethod
    def zero(cls, ring: RingDescriptor, k: int) -> "Submodule":
        return cls(ring, k, ())

    def _is_modulus_row(self, c, row) -> bool:
        return bool(self.ring.modulus) and row[c] == self.ring.modulus

    # -- views ---------------------------------------------------------------

    @property
    def echelon_basis(self) -> tuple:
        """Full internal basis ``((pivot, row), ...)``, modulus rows included."""
        return self._basis

    @cached_property
    def basis(self) -> tuple:
        """Canonical basis vectors (modulus rows dropped)."""
        return tuple(row for c, row in self._basis if not self._is_modulus_row(c, row))

    @property
    def generators(self) -> Mat:
        return Mat.from_columns(self._gens, nrows=self.ambient_rank)

    @property
    def canonical_form(self) -> Mat:
        return Mat.from_columns(self.basis, nrows=self.ambient_rank)

    @property
    def lattice_rank(self) -> int:
        """Rank of the preimage lattice over the underlying domain."""
        return len(self._basis)

    def is_zero(self) -> bool:
        return not self.basis

    def is_full(self) -> bool:
        return self == Submodule.full(self.ring, self.ambient_rank)

    # -- lattice operations ----------------------------------------------------

    def _check(self, other: "Submodule"):
        if self.ring != other.ring or self.ambient_rank != other.ambient_rank:
            raise AmbientMismatch(
                f"submodules of {self.ring}^{self.ambient_rank} and {other.ring}^{other.ambient_rank}"
            )

    def reduce(self, v: Sequence) -> tuple:
        """Canonical representative of ``v`` modulo this submodule."""
        if len(v) != self.ambient_rank:
            raise AmbientMismatch(f"vector of length {len(v)} in ambient rank {self.ambient_rank}")
        return tuple(_reduce_vector(self.ring, v, self._basis))

    def __contains__(self, v: Sequence) -> bool:
        return not any(self.reduce(v))

    def contains(self, v: Sequence) -> bool:
        return v in self

    def __le__(self, other: "Submodule") -> bool:
        self._check(other)
        return all(row in other for row in self.basis)

    def __ge__(self, other: "Submodule") -> bool:
        return other <= self

    def __lt__(self, other: "Submodule") -> bool:
        return self <= other and self != other

    def __eq__(self, other):
        if not isinstance(other, Submodule):
            return NotImplemented
        return (self.ring, self.ambient_rank, self._basis) == (other.ring, other.ambient_rank, other._basis)

    def __hash__(self):
        return hash((self.ring, self.ambient_rank, self._basis))

    def __add__(self, other: "Submodule") -> "Submodule":
        self._check(other)
        return Submodule(self.ring, self.ambient_rank, self.basis + other.basis)

    def __and__(self, other: "Submodule") -> "Submodule":
        self._check(other)
        k = self.ambient_rank
        zero = self.ring.zero
        rows = [row + row for row in self.basis]
        rows += [row + (zero,) * k for row in other.basis]
        basis = echelon(self.ring, rows, 2 * k)
        return Submodule(self.ring, k, _split_lower(basis, k))

    def coordinates(self, v: Sequence, lifted: bool = False) -> tuple:
        """Coefficients of ``v`` on :attr:`echelon_basis`; raises if ``v`` is not a member.

        With ``lifted`` the vector is read in the preimage lattice over the
        underlying domain, so ``n e_i`` over ``Z/n`` is not treated as zero.
        """
        red = (lambda a: a) if lifted else self.ring.reduce
        v = [red(a) for a in v]
        coeffs = []
        for c, row in self._basis:
            q, r = divmod(v[c], row[c])
            if r:
                raise NotContained(f"{tuple(v)} is not in the submodule")
            coeffs.append(q)
            if q:
                v = v[:c] + [a - q * b for a, b in zip(v[c:], row[c:])]
        if any(red(a) for a in v):
            raise NotContained("vector is not in the submodule")
        return tuple(coeffs)

    def project(self, coords: Sequence[int]) -> "Submodule":
        """Image under the coordinate projection onto ``coords``."""
        return Submodule(self.ring, len(coords), (tuple(row[i] for i in coords) for row in self.basis))

    def slice(self, coords: Sequence[int]) -> "Submodule":
        """Elements supported on ``coords``, restricted to those coordinates."""
        k = self.ambient_rank
        others = [i for i in range(k) if i not in set(coords)]
        order = list(others) + list(coords)
        basis = echelon(self.ring, (tuple(row[i] for i in order) for row in self.basis), k)
        return Submodule(self.ring, len(coords), _split_lower(basis, len(others)))

    def __repr__(self):
        return f"Submodule({self.ring}^{self.ambient_rank}, basis={[list(b) for b in self.basis]})"


def hermite_form(m: Mat, ring: RingDescriptor = ZZ) -> Mat:
    """Column-style Hermite form of the column span of ``m``; zero columns are dropped."""
    return Submodule.from_mat(ring, m).canonical_form


def sub_membership(v: Sequence, s: Submodule) -> bool:
    return v in s


def sub_sum(s1: Submodule, s2: Submodule) -> Submodule:
    return s1 + s2


def sub_intersection(s1: Submodule, s2: Submodule) -> Submodule:
    return s1 & s2


def sub_leq(s1: Submodule, s2: Submodule) -> bool:
    return s1 <= s2


def quotient_order(big: Submodule, small: Submodule):
    """``|big / small|`` as an int, or ``math.inf``; via Smith form of the inclusion."""
    if not small <= big:
        raise NotContained("quotient_order requires small <= big")
    ring = big.ring
    if small.lattice_rank != big.lattice_rank:
        return INFINITE
    if not big.echelon_basis:
        return 1
    # the lifted lattices are what is compared, so work over the underlying domain
    base = ring if ring.is_polynomial else ZZ
    coeffs = [big.coordinates(row, lifted=True) for _, row in small.echelon_basis]
    _, d, _ = smith_form(Mat.from_rows(coeffs), base)
    total = 1
    for i in range(d.nrows):
        total *= base.quotient_size(d[i, i])
    return total


def kernel_rows(ring: RingDescriptor, rows: Sequence[Sequence], ncols: int) -> Submodule:
    """Left kernel ``{u : u . rows = 0}`` of a list of row vectors (in ``R^len(rows)``)."""
    r = len(rows)
    zero, one = ring.zero, ring.one
    aug = [tuple(row) + tuple(one if i == j else zero for j in range(r)) for i, row in enumerate(rows)]
    return Submodule(ring, r, _split_lower(echelon(ring, aug, ncols + r), ncols))


def preimage(ring: RingDescriptor, f: Mat, target: Submodule) -> Submodule:
    """``{u in R^cols : f u in target}``."""
    if target.ambient_rank != f.nrows:
        raise DimensionMismatch("target lives in the wrong ambient rank")
    n = f.ncols
    zero, one = ring.zero, ring.one
    rows = [col + tuple(one if i == j else zero for i in range(n)) for j, col in enumerate(f.columns())]
    rows += [g + (zero,) * n for g in target.basis]
    return Submodule(ring, n, _split_lower(echelon(ring, rows, f.nrows + n), f.nrows))


def solve_linear(
    a: Mat,
    b: Sequence,
    modulo: Optional[Submodule] = None,
    ring: RingDescriptor = ZZ,
    tiebreak: str = "first",
) -> Optional[tuple]:
    """Some ``x`` with ``a x - b in modulo`` (or ``a x = b``), else ``None``.

    The returned solution is canonical for the given ``tiebreak`` order
    (``"first"`` or ``"last"``): it is reduced against the solution lattice
    of the homogeneous system with unknowns listed in that order.
    """
    mrows, n = a.shape
    if len(b) != mrows:
        raise DimensionMismatch(f"right-hand side of length {len(b)} for {a.shape} system")
    if modulo is not None:
        if modulo.ring != ring:
            raise DimensionMismatch("modulo submodule over a different ring")
        if modulo.ambient_rank != mrows:
            raise DimensionMismatch("modulo submodule lives in the wrong ambient rank")
    if tiebreak not in ("first", "last"):
        raise ValueError("tiebreak must be 'first' or 'last'")
    order = list(range(n)) if tiebreak == "first" else list(range(n - 1, -1, -1))
    zero, one = ring.zero, ring.one
    cols = a.columns()
    rows = [cols[j] + tuple(one if i == pos else zero for i in range(n)) for pos, j in enumerate(order)]
    if modulo is not None:
        rows += [g + (zero,) * n for g in modulo.basis]
    basis = echelon(ring, rows, mrows + n)
    vec = _reduce_vector(ring, tuple(b) + (zero,) * n, basis)
    if any(vec[:mrows]):
        return None
    homogeneous = [(c - mrows, row[mrows:]) for c, row in basis if c >= mrows]
    sol = _reduce_vector(ring, [-t for t in vec[mrows:]], homogeneous)
    x = [zero] * n
    for pos, j in enumerate(order):
        x[j] = sol[pos]
    return tuple(x)


def smith_form(m: Mat, ring: RingDescriptor = ZZ):
    """``(U, D, V)`` with ``U m V = D`` diagonal, ``d_1 | d_2 | ...``, U and V invertible.

    Over ``Z/n`` the computation is lifted to ``Z`` and the diagonal is
    normalized to divisors of ``n`` by unit row scalings.
    """
    r, c = m.shape
    red = ring.reduce
    a = [[red(x) for x in row] for row in m.rows]
    zero, one = ring.zero, ring.one
    u = [[one if i == j else zero for j in range(r)] for i in range(r)]
    v = [[one if i == j else zero for j in range(c)] for i in range(c)]
    size = ring.size

    def row_op(i, j, q):  # row_i -= q * row_j
        a[i] = [x - q * y for x, y in zip(a[i], a[j])]
        u[i] = [x - q * y for x, y in zip(u[i], u[j])]

    def col_op(i, j, q):  # col_i -= q * col_j
        for row in a:
            row[i] = row[i] - q * row[j]
        for row in v:
            row[i] = row[i] - q * row[j]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    t = 0
    while t < min(r, c):
        best = None
        for i in range(t, r):
            for j in range(t, c):
                if a[i][j] and (best is None or size(a[i][j]) < size(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            p = a[t][t]
            for i in range(t + 1, r):
                if a[i][t]:
                    row_op(i, t, a[i][t] // p)
            for j in range(t + 1, c):
                if a[t][j]:
                    col_op(j, t, a[t][j] // p)
            rest = [(i, t) for i in range(t + 1, r) if a[i][t]] + [(t, j) for j in range(t + 1, c) if a[t][j]]
            if rest:
                i, j = min(rest, key=lambda ij: size(a[ij[0]][ij[1]]))
                if j == t:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = next(
                (i for i in range(t + 1, r) for j in range(t + 1, c) if a[i][j] and a[i][j] % p),
                None,
            )
            if bad is not None:
                a[t] = [x + y for x, y in zip(a[t], a[bad])]
                u[t] = [x + y for x, y in zip(u[t], u[bad])]
                continue
            break
        nu = ring.normal_unit(a[t][t])
        if nu != 1:
            a[t] = [x * nu for x in a[t]]
            u[t] = [x * nu for x in u[t]]
        t += 1

    mod = ring.modulus
    if mod:
        for i in range(min(r, c)):
            d = a[i][i] % mod
            g = ring.ring_gcd(d, mod) if d else 0
            if d and g != d:
                unit = _unit_scaling(d, g, mod)
                a[i] = [x * unit for x in a[i]]
                u[i] = [x * unit for x in u[i]]
        a = [[x % mod for x in row] for row in a]
        u = [[x % mod for x in row] for row in u]
        v = [[x % mod for x in row] for row in v]
    return (
        Mat.from_rows(u, ncols=r),
        Mat.from_rows(a, ncols=c),
        Mat.from_rows(v, ncols=c),
    )


def _unit_scaling(d: int, g: int, n: int) -> int:
    """A unit ``w`` of ``Z/n`` with ``w d = g (mod n)`` where ``g = gcd(d, n)``."""
    h = n // g
    base = pow((d // g) % h, -1, h) if h > 1 else 0
    for t in range(g + 1):
        w = base + t * h
        if math.gcd(w, n) == 1:
            return w
    raise ArithmeticError("no unit scaling found")  # unreachable for g = gcd(d, n)


def invariant_factors(m: Mat, ring: RingDescriptor = ZZ) -> tuple:
    _, d, _ = smith_form(m, ring)
    return tuple(d[i, i] for i in range(min(d.shape)))


def determinant(m: Mat, ring: RingDescriptor = ZZ):
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = m.nrows
    if m.ncols != n:
        raise DimensionMismatch("determinant of a non-square matrix")
    if n == 0:
        return ring.one
    a = [[ring.reduce(x) if ring.is_polynomial else x for x in row] for row in m.rows]
    sign = 1
    prev = ring.one
    for k in range(n - 1):
        if not a[k][k]:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return ring.zero
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return ring.reduce(a[n - 1][n - 1] * sign)
