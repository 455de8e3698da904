"""Brute-force counterparts of evaluation, implication and pp indices.

Only finite rings ``Z/n`` and ``F_p`` are handled.  A module ``R^k / Rel``
is enumerated by listing all of ``R^k`` and labelling cosets of ``Rel``
with a connected-components pass over the graph ``v -- v + r``.  Nothing
here calls the Hermite/Smith machinery or the linear solver: the point is
to be an independent check on them.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import RingNotFinite, TooLarge

#: Largest ambient ``R^k`` (or ``M^n``) the oracle will list.
AMBIENT_BOUND = 3 * 10**6
#: Largest number of witness combinations scanned in one membership test.
SCAN_BOUND = 5 * 10**6


class FiniteModule:
    """``(Z/N)^k`` modulo the span of ``relations``, with elements numbered ``0..order-1``."""

    def __init__(self, modulus: int, num_gens: int, relations):
        size = modulus**num_gens
        if size > AMBIENT_BOUND:
            raise TooLarge(f"ambient module of size {size} exceeds {AMBIENT_BOUND}")
        self.N = modulus
        self.k = num_gens
        self.radix = np.array([modulus**j for j in range(num_gens)], dtype=np.int64)
        vecs = self.decode(np.arange(size, dtype=np.int64))
        rels = [np.array(r, dtype=np.int64) % modulus for r in relations]
        rels = [r for r in rels if r.any()]
        if rels:
            src = np.concatenate([np.arange(size, dtype=np.int64)] * len(rels))
            dst = np.concatenate([self.encode((vecs + r) % modulus) for r in rels])
            graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(size, size))
            count, labels = connected_components(graph, directed=False)
        else:
            count, labels = size, np.arange(size)
        # renumber so that labels follow the first ambient vector of each coset
        _, first = np.unique(labels, return_index=True)
        order = np.argsort(first)
        relabel = np.empty(count, dtype=np.int64)
        relabel[order] = np.arange(count)
        self.label = relabel[labels]
        self.order = count
        self.rep = vecs[np.sort(first)]

    def encode(self, vecs: np.ndarray) -> np.ndarray:
        if self.k == 0:
            return np.zeros(len(vecs), dtype=np.int64)
        return (vecs % self.N) @ self.radix

    def decode(self, codes: np.ndarray) -> np.ndarray:
        return (codes[:, None] // self.radix[None, :]) % self.N if self.k else np.zeros((len(codes), 0), np.int64)

    def elem(self, coords) -> int:
        v = np.array([list(coords)], dtype=np.int64).reshape(1, self.k)
        return int(self.label[self.encode(v)][0])

    def add(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.label[self.encode(self.rep[a] + self.rep[b])]

    def neg(self, a: np.ndarray) -> np.ndarray:
        return self.label[self.encode(-self.rep[a])]

    def scale(self, c: int, a: np.ndarray) -> np.ndarray:
        return self.label[self.encode(int(c) * self.rep[a])]

    def coords(self, a: int) -> tuple:
        return tuple(int(v) for v in self.rep[a])


def _modulus(ring) -> int:
    if not ring.is_finite or ring.is_polynomial:
        raise RingNotFinite(f"brute force needs a finite ring, got {ring}")
    return ring.modulus


@lru_cache(maxsize=256)
def _finite(modulus: int, num_gens: int, relations: tuple) -> FiniteModule:
    return FiniteModule(modulus, num_gens, relations)


def finite_module(module) -> FiniteModule:
    """The enumerated form of an :class:`~ppbass.fpmod.FpModule`, read from its given presentation."""
    return _finite(_modulus(module.ring), module.num_gens, tuple(module.given_relations))


def _tuple_codes(fm: FiniteModule, ids: np.ndarray) -> np.ndarray:
    """Codes of rows of element ids (shape ``(count, m)``)."""
    m = ids.shape[1]
    if fm.order**m >= 2**62:
        raise TooLarge("tuple space too large to index")
    weights = np.array([fm.order**r for r in range(m)], dtype=np.int64)
    return ids @ weights if m else np.zeros(len(ids), dtype=np.int64)


def _linear_image(fm: FiniteModule, coeffs: np.ndarray, ids: np.ndarray) -> np.ndarray:
    """Rows ``Σ_s coeffs[r, s] * ids[:, s]`` for each row ``r``; shape ``(count, m)``."""
    count = ids.shape[0]
    m, l = coeffs.shape
    out = np.zeros((count, m), dtype=np.int64)
    for r in range(m):
        acc = np.full(count, fm.elem([0] * fm.k), dtype=np.int64)
        for s in range(l):
            c = int(coeffs[r, s]) % fm.N
            if c:
                acc = fm.add(acc, fm.scale(c, ids[:, s]))
        out[:, r] = acc
    return out


def _rows_in(rows: np.ndarray, table: np.ndarray) -> np.ndarray:
    """Mask of the rows of ``rows`` that occur among the rows of ``table``."""
    if rows.shape[1] == 0:
        return np.full(len(rows), len(table) > 0)
    _, inverse = np.unique(np.concatenate([table, rows]), axis=0, return_inverse=True)
    inverse = inverse.ravel()
    return np.isin(inverse[len(table):], inverse[: len(table)])


def _image_set(fm: FiniteModule, a: np.ndarray) -> np.ndarray:
    """Distinct rows of ``{A ȳ : ȳ ∈ M^l}``, grown one witness column at a time."""
    m, l = a.shape
    zero = fm.elem([0] * fm.k)
    current = np.full((1, m), zero, dtype=np.int64)
    everything = np.arange(fm.order, dtype=np.int64)
    for s in range(l):
        column = _linear_image(fm, a[:, [s]], everything[:, None])
        if len(current) * len(column) > SCAN_BOUND:
            raise TooLarge("witness image too large to scan")
        left = np.repeat(current, len(column), axis=0)
        right = np.tile(column, (len(current), 1))
        summed = np.stack([fm.add(left[:, r], right[:, r]) for r in range(m)], axis=1) if m else left
        current = np.unique(summed, axis=0) if m else summed[:1]
    return current


def _grid(order: int, r: int) -> np.ndarray:
    """All ``r``-tuples of element ids, first entry varying fastest; shape ``(order**r, r)``."""
    if r == 0:
        return np.zeros((1, 0), dtype=np.int64)
    codes = np.arange(order**r, dtype=np.int64)
    return np.stack([codes // order**j % order for j in range(r)], axis=1)


def _matrix(mat, modulus: int) -> np.ndarray:
    return np.array(mat.rows, dtype=np.int64).reshape(mat.nrows, mat.ncols) % modulus


@dataclass
class FiniteSolutionSet:
    """``φ(M)`` listed explicitly; tuples of ``M^n`` are coded as ``Σ a_j |M|^j``."""

    module: FiniteModule
    arity: int
    members: np.ndarray

    @property
    def ambient_size(self) -> int:
        return self.module.order**self.arity

    def __len__(self) -> int:
        return len(self.members)

    def tuples(self) -> list:
        """Members as tuples of element ids."""
        o = self.module.order
        return [tuple(int(c) // o**j % o for j in range(self.arity)) for c in self.members]

    def coordinate_vectors(self) -> list:
        """Members as concatenated coordinate vectors of representatives."""
        return [sum((self.module.coords(a) for a in t), ()) for t in self.tuples()]

    def contains(self, ids) -> bool:
        code = int(_tuple_codes(self.module, np.array([list(ids)], dtype=np.int64).reshape(1, self.arity))[0])
        return bool(np.isin(code, self.members))

    def is_subgroup(self) -> bool:
        """Contains 0, closed under addition and under the ring action."""
        fm = self.module
        if len(self.members) == 0:
            return False
        ids = np.array(self.tuples(), dtype=np.int64).reshape(len(self.members), self.arity)
        zero = np.zeros((1, self.arity), dtype=np.int64) + fm.elem([0] * fm.k)
        if not np.isin(_tuple_codes(fm, zero), self.members).all():
            return False
        for g in ids:
            shifted = np.stack([fm.add(ids[:, j], np.full(len(ids), g[j])) for j in range(self.arity)], axis=1)
            if self.arity and not np.isin(_tuple_codes(fm, shifted), self.members).all():
                return False
        for c in range(fm.N):
            scaled = np.stack([fm.scale(c, ids[:, j]) for j in range(self.arity)], axis=1) if self.arity else ids
            if self.arity and not np.isin(_tuple_codes(fm, scaled), self.members).all():
                return False
        return True


def evaluate_brute(phi, module) -> FiniteSolutionSet:
    """Scan every ``x̄ ∈ M^n`` against the set of values ``A ȳ``."""
    fm = finite_module(module)
    return _evaluate(fm, phi)


def _evaluate(fm: FiniteModule, phi) -> FiniteSolutionSet:
    n = phi.arity
    if fm.order**n > AMBIENT_BOUND:
        raise TooLarge(f"M^{n} has {fm.order ** n} elements")
    a, b = _matrix(phi.A, fm.N), _matrix(phi.B, fm.N)
    image = _image_set(fm, a)
    grid = _grid(fm.order, n)
    values = _linear_image(fm, b, grid)
    mask = _rows_in(values, image)
    members = _tuple_codes(fm, grid[mask])
    return FiniteSolutionSet(fm, n, members)


def _holds(fm: FiniteModule, phi, tuple_ids) -> bool:
    """Does the tuple satisfy ``φ``?  Scans all witnesses but the last, which is looked up."""
    a, b = _matrix(phi.A, fm.N), _matrix(phi.B, fm.N)
    m, l = a.shape
    if m == 0:
        return True
    x = np.array([list(tuple_ids)], dtype=np.int64).reshape(1, phi.arity)
    target = _linear_image(fm, b, x)[0]
    if l == 0:
        zero = fm.elem([0] * fm.k)
        return bool((target == zero).all())
    last = _linear_image(fm, a[:, [l - 1]], np.arange(fm.order, dtype=np.int64)[:, None])
    if fm.order ** (l - 1) > SCAN_BOUND:
        raise TooLarge("too many witnesses to scan")
    head = _grid(fm.order, l - 1)
    partial = _linear_image(fm, a[:, : l - 1], head)
    rest = np.stack([fm.add(np.full(len(head), target[r]), fm.neg(partial[:, r])) for r in range(m)], axis=1)
    return bool(_rows_in(rest, last).any())


def _eliminate_units(modulus: int, k: int, rels: list, tup: list):
    """Substitute away generators that carry a unit coefficient in some relation."""
    from math import gcd

    rels = [[c % modulus for c in r] for r in rels]
    tup = [[c % modulus for c in v] for v in tup]
    j = 0
    while j < k:
        hit = next((r for r in rels if gcd(r[j], modulus) == 1), None)
        if hit is None:
            j += 1
            continue
        rels.remove(hit)
        inv = pow(hit[j], -1, modulus)
        sub = [(-inv * c) % modulus for c in hit]

        def drop(v):
            return [(v[t] + v[j] * sub[t]) % modulus for t in range(k) if t != j]

        rels = [w for w in (drop(r) for r in rels) if any(w)]
        tup = [drop(v) for v in tup]
        k -= 1
        j = 0
    return k, rels, tup


def brute_free_realization(phi):
    """``(FiniteModule, tuple ids)`` presented by ``[B | -A]`` with unit generators substituted away."""
    modulus = _modulus(phi.ring)
    n, l = phi.arity, phi.bound
    rels = [list(b) + [-c for c in a] for a, b in zip(phi.A.rows, phi.B.rows)]
    tup = [[1 if t == j else 0 for t in range(n + l)] for j in range(n)]
    k, rels, tup = _eliminate_units(modulus, n + l, rels, tup)
    fm = _finite(modulus, k, tuple(tuple(r) for r in rels))
    return fm, tuple(fm.elem(v) for v in tup)


def implies_brute(phi, psi) -> bool:
    """Whether the generic tuple of ``φ`` satisfies ``ψ``, decided by enumeration."""
    fm, tup = brute_free_realization(phi)
    return _holds(fm, psi, tup)


def index_brute(pair, module) -> int:
    """``|φ(M)| / |ψ(M)|`` for a pair ``(φ, ψ)`` (or an object with ``top``/``bottom``)."""
    top, bottom = (pair.top, pair.bottom) if hasattr(pair, "top") else pair
    fm = finite_module(module)
    big, small = _evaluate(fm, top), _evaluate(fm, bottom)
    if len(big) % len(small):
        raise ArithmeticError("solution sets are not nested subgroups")
    return len(big) // len(small)


def module_order_brute(module) -> int:
    return finite_module(module).order


__all__ = [
    "AMBIENT_BOUND",
    "FiniteModule",
    "FiniteSolutionSet",
    "brute_free_realization",
    "evaluate_brute",
    "finite_module",
    "implies_brute",
    "index_brute",
    "module_order_brute",
]
