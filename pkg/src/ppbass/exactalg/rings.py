"""Ring descriptors and the polynomial element type.

Every supported ring is a Euclidean domain ``D`` (the integers or
``F_p[x]``) optionally taken modulo a fixed element.  ``Z/n`` and ``F_p``
are handled by lifting to the integers with modulus ``n`` (resp. ``p``), so
a single normal-form engine serves all of them.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterator, Union

from sympy import isprime

from ..errors import RingLiteralError

#: Capability flag for ``F_p[x]``; nothing in the acceptance suite needs it.
POLYNOMIAL_SUPPORT = True

INFINITE = math.inf


class Poly:
    """Dense univariate polynomial over ``F_p``, coefficients low degree first."""

    __slots__ = ("p", "coeffs")

    def __init__(self, coeffs, p: int):
        cs = [int(c) % p for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.p = p
        self.coeffs = tuple(cs)

    @classmethod
    def const(cls, c: int, p: int) -> "Poly":
        return cls((c,), p)

    @classmethod
    def monomial(cls, degree: int, p: int, c: int = 1) -> "Poly":
        return cls((0,) * degree + (c,), p)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.p != self.p:
                raise ValueError("polynomials over different prime fields")
            return other
        if isinstance(other, int):
            return Poly.const(other, self.p)
        return NotImplemented

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = Poly.const(other, self.p)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.p == other.p and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(("Poly", self.p, self.coeffs))

    def __neg__(self):
        return Poly([-c for c in self.coeffs], self.p)

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return Poly([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)], self.p)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly((), self.p)
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return Poly(out, self.p)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result, base = Poly.const(1, self.p), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __divmod__(self, other):
        other = self._lift(other)
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        p = self.p
        inv = pow(other.lc, -1, p)
        rem = list(self.coeffs)
        db = other.degree
        quot = [0] * max(len(rem) - db, 0)
        for k in range(len(rem) - 1, db - 1, -1):
            c = rem[k] % p
            if c:
                q = c * inv % p
                quot[k - db] = q
                for j, bc in enumerate(other.coeffs):
                    rem[k - db + j] -= q * bc
        return Poly(quot, p), Poly(rem[:db] if db > 0 else (), p)

    def __rdivmod__(self, other):
        return divmod(self._lift(other), self)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __repr__(self):
        return f"Poly({format_poly(self)!r}, p={self.p})"

    def __str__(self):
        return format_poly(self)


def format_poly(f: Poly, var: str = "x") -> str:
    if not f.coeffs:
        return "0"
    terms = []
    for d in range(f.degree, -1, -1):
        c = f.coeffs[d]
        if not c:
            continue
        if d == 0:
            terms.append(str(c))
        else:
            mono = var if d == 1 else f"{var}^{d}"
            terms.append(mono if c == 1 else f"{c}*{mono}")
    return "+".join(terms)


Element = Union[int, Poly]

_RING_RE = re.compile(r"^\s*(Z|Zmod|Fp|Fpx)\s*(?::\s*(\d+))?\s*$")


@dataclass(frozen=True)
class RingDescriptor:
    """One of ``Z``, ``Zmod:n``, ``Fp:p`` or ``Fpx:p``.

    Elements are Python ints for the first three (canonical representatives
    in ``[0, n)`` for the quotient rings) and :class:`Poly` for ``Fpx``.
    """

    kind: str
    n: int = 0

    def __post_init__(self):
        if self.kind == "Z":
            if self.n:
                raise ValueError("Z takes no parameter")
        elif self.kind == "Zmod":
            if self.n < 2:
                raise ValueError(f"Zmod requires n >= 2, got {self.n}")
        elif self.kind in ("Fp", "Fpx"):
            if not isprime(self.n):
                raise ValueError(f"{self.kind} requires a prime, got {self.n}")
            if self.kind == "Fpx" and not POLYNOMIAL_SUPPORT:
                raise RuntimeError("polynomial ring support is disabled")
        else:
            raise ValueError(f"unknown ring kind {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "RingDescriptor":
        m = _RING_RE.match(text)
        if not m:
            raise ValueError(f"cannot parse ring descriptor {text!r}")
        kind, arg = m.group(1), m.group(2)
        if kind == "Z":
            if arg is not None:
                raise ValueError("Z takes no parameter")
            return cls("Z")
        if arg is None:
            raise ValueError(f"{kind} needs a parameter, e.g. {kind}:5")
        return cls(kind, int(arg))

    def __str__(self):
        return "Z" if self.kind == "Z" else f"{self.kind}:{self.n}"

    # -- structure ---------------------------------------------------------

    @property
    def is_polynomial(self) -> bool:
        return self.kind == "Fpx"

    @property
    def modulus(self) -> int:
        """The integer every element is reduced by (0 when there is none)."""
        return self.n if self.kind in ("Zmod", "Fp") else 0

    @property
    def is_finite(self) -> bool:
        return self.modulus != 0

    @property
    def order(self) -> float:
        return self.modulus if self.modulus else INFINITE

    @property
    def zero(self) -> Element:
        return Poly((), self.n) if self.is_polynomial else 0

    @property
    def one(self) -> Element:
        return Poly((1,), self.n) if self.is_polynomial else 1

    def elements(self) -> Iterator[int]:
        if not self.is_finite:
            raise ValueError(f"{self} is infinite")
        return iter(range(self.modulus))

    # -- element handling --------------------------------------------------

    def coerce(self, value) -> Element:
        """Turn an int / Poly into a canonical element of this ring."""
        if self.is_polynomial:
            if isinstance(value, Poly):
                if value.p != self.n:
                    raise RingLiteralError(f"polynomial over F_{value.p} used in {self}")
                return value
            if isinstance(value, int):
                return Poly.const(value, self.n)
            raise RingLiteralError(f"not an element of {self}: {value!r}")
        if isinstance(value, bool) or not isinstance(value, int):
            raise RingLiteralError(f"not an element of {self}: {value!r}")
        m = self.modulus
        return value % m if m else value

    def reduce(self, a: Element) -> Element:
        if self.is_polynomial:
            return a if isinstance(a, Poly) else Poly.const(a, self.n)
        m = self.modulus
        return a % m if m else a

    def is_zero(self, a: Element) -> bool:
        return not self.reduce(a)

    def is_unit(self, a: Element) -> bool:
        if self.is_polynomial:
            return bool(a) and a.degree == 0
        m = self.modulus
        if m:
            return math.gcd(a, m) == 1
        return a in (1, -1)

    def unit_inverse(self, a: Element) -> Element:
        if self.is_polynomial:
            return Poly.const(pow(a.lc, -1, self.n), self.n)
        m = self.modulus
        if m:
            return pow(a % m, -1, m)
        if a in (1, -1):
            return a
        raise ZeroDivisionError(f"{a} is not a unit in {self}")

    # -- Euclidean structure of the underlying domain ------------------------

    def normal_unit(self, a: Element) -> Element:
        """Unit ``u`` of the domain making ``u * a`` normalized (positive / monic)."""
        if self.is_polynomial:
            return Poly.const(pow(a.lc, -1, self.n), self.n) if a else self.one
        return -1 if a < 0 else 1

    def size(self, a: Element) -> int:
        """Euclidean size; strictly decreases under remainder."""
        if self.is_polynomial:
            return a.degree
        return abs(a)

    def quotient_size(self, d: Element) -> float:
        """Cardinality of ``D / dD`` for the underlying domain."""
        if not d:
            return INFINITE
        if self.is_polynomial:
            return self.n ** d.degree
        return abs(d)

    def divides(self, a: Element, b: Element) -> bool:
        """Whether ``a`` divides ``b`` in the ring (not just the domain)."""
        m = self.modulus
        if m:
            return b % math.gcd(a, m) == 0
        if not a:
            return not b
        return not (b % a)

    def ring_gcd(self, a: Element, b: Element) -> Element:
        if self.is_polynomial:
            while b:
                a, b = b, a % b
            return a * self.normal_unit(a) if a else a
        g = math.gcd(a, b)
        return math.gcd(g, self.modulus) if self.modulus else g


def Integers() -> RingDescriptor:
    return RingDescriptor("Z")


def IntegersMod(n: int) -> RingDescriptor:
    return RingDescriptor("Zmod", n)


def PrimeField(p: int) -> RingDescriptor:
    return RingDescriptor("Fp", p)


def PolynomialsOverPrimeField(p: int) -> RingDescriptor:
    return RingDescriptor("Fpx", p)


ZZ = Integers()


def element_to_json(a: Element):
    """ints stay ints; polynomials become coefficient lists, low degree first."""
    return list(a.coeffs) if isinstance(a, Poly) else a


def element_from_json(ring: RingDescriptor, value) -> Element:
    if ring.is_polynomial and isinstance(value, list):
        return Poly(value, ring.n)
    return ring.coerce(value)
