"""Immutable dense matrices with exact entries (ints or :class:`Poly`)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from ..errors import DimensionMismatch


@dataclass(frozen=True)
class Mat:
    """Row-major exact matrix; ``rows`` is a tuple of equal-length tuples.

    The shape is stored explicitly so that ``0 x k`` and ``k x 0`` matrices
    keep their dimensions.
    """

    nrows: int
    ncols: int
    rows: tuple

    def __post_init__(self):
        if len(self.rows) != self.nrows or any(len(r) != self.ncols for r in self.rows):
            raise DimensionMismatch(f"entries do not form a {self.nrows}x{self.ncols} matrix")

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence], ncols: int | None = None) -> "Mat":
        rows = tuple(tuple(r) for r in rows)
        if ncols is None:
            if not rows:
                raise DimensionMismatch("ncols required for a matrix without rows")
            ncols = len(rows[0])
        return cls(len(rows), ncols, rows)

    @classmethod
    def from_columns(cls, cols: Iterable[Sequence], nrows: int | None = None) -> "Mat":
        cols = [tuple(c) for c in cols]
        if nrows is None:
            if not cols:
                raise DimensionMismatch("nrows required for a matrix without columns")
            nrows = len(cols[0])
        if any(len(c) != nrows for c in cols):
            raise DimensionMismatch("columns of unequal length")
        return cls(nrows, len(cols), tuple(tuple(c[i] for c in cols) for i in range(nrows)))

    @classmethod
    def zeros(cls, nrows: int, ncols: int, zero=0) -> "Mat":
        return cls(nrows, ncols, tuple((zero,) * ncols for _ in range(nrows)))

    @classmethod
    def identity(cls, n: int, zero=0, one=1) -> "Mat":
        return cls(n, n, tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)))

    @property
    def shape(self) -> tuple:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def row(self, i: int) -> tuple:
        return self.rows[i]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list:
        return [self.col(j) for j in range(self.ncols)]

    @property
    def T(self) -> "Mat":
        return Mat(self.ncols, self.nrows, tuple(tuple(r[j] for r in self.rows) for j in range(self.ncols)))

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        cols = other.columns()
        out = []
        for r in self.rows:
            out.append(tuple(_dot(r, c) for c in cols))
        return Mat(self.nrows, other.ncols, tuple(out))

    def apply(self, vec: Sequence) -> tuple:
        if len(vec) != self.ncols:
            raise DimensionMismatch(f"vector of length {len(vec)} for {self.shape} matrix")
        return tuple(_dot(r, vec) for r in self.rows)

    def map(self, fn) -> "Mat":
        return Mat(self.nrows, self.ncols, tuple(tuple(fn(x) for x in r) for r in self.rows))

    def hstack(self, other: "Mat") -> "Mat":
        if self.nrows != other.nrows:
            raise DimensionMismatch("hstack needs equal row counts")
        return Mat(self.nrows, self.ncols + other.ncols, tuple(a + b for a, b in zip(self.rows, other.rows)))

    def vstack(self, other: "Mat") -> "Mat":
        if self.ncols != other.ncols:
            raise DimensionMismatch("vstack needs equal column counts")
        return Mat(self.nrows + other.nrows, self.ncols, self.rows + other.rows)

    def select_columns(self, idx: Sequence[int]) -> "Mat":
        return Mat(self.nrows, len(idx), tuple(tuple(r[j] for j in idx) for r in self.rows))

    def select_rows(self, idx: Sequence[int]) -> "Mat":
        return Mat(len(idx), self.ncols, tuple(self.rows[i] for i in idx))

    def is_zero(self) -> bool:
        return not any(x for r in self.rows for x in r)

    def tolist(self) -> list:
        return [list(r) for r in self.rows]

    def __repr__(self):
        return f"Mat({self.tolist()!r})" if self.nrows else f"Mat(0x{self.ncols})"


def _dot(a: Sequence, b: Sequence):
    total = 0
    for x, y in zip(a, b):
        if x and y:
            total = x * y + total
    return total


def block_diag(blocks: Sequence[Mat], zero=0) -> Mat:
    nr = sum(b.nrows for b in blocks)
    nc = sum(b.ncols for b in blocks)
    rows = []
    off = 0
    for b in blocks:
        for r in b.rows:
            rows.append((zero,) * off + tuple(r) + (zero,) * (nc - off - b.ncols))
        off += b.ncols
    return Mat(nr, nc, tuple(rows))


def kron_identity(m: Mat, k: int, zero=0) -> Mat:
    """``m ⊗ I_k``: acts blockwise on tuples of length-``k`` coordinate vectors."""
    rows = []
    for r in m.rows:
        for t in range(k):
            row = [zero] * (m.ncols * k)
            for s, a in enumerate(r):
                row[s * k + t] = a
            rows.append(tuple(row))
    return Mat(m.nrows * k, m.ncols * k, tuple(rows))
