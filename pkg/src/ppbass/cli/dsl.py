"""Text syntax for pp formulas and stage-indexed chain templates.

    formula := ["exists" ident+] "(" eq (";" eq)* ")" | eq (";" eq)*
    eq      := linear "=" linear
    linear  := ["-"] term (("+" | "-") term)*
    term    := factor ("*" factor)*        at most one factor is a variable

A coefficient factor is an integer, a field literal ``p:k``, ``pow(a, b)``,
or a bracketed/parenthesized coefficient expression.  Inside coefficient
expressions ``i`` is the stage index (templates only) and ``x`` is the
indeterminate of ``Fpx`` rings; everywhere else identifiers are variables.

``x = 2*y`` compiles to ``A = [2]``, ``B = [1]``: bound-variable
coefficients of the right side minus the left form ``A``, free-variable
coefficients of the left side minus the right form ``B``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Sequence

from ..errors import ParseError, RingLiteralError, UnknownVariable
from ..exactalg import Mat, Poly, RingDescriptor, format_poly
from ..ppcalc import PpFormula

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


@dataclass(frozen=True)
class Tok:
    kind: str  # "num", "id", "op", "end"
    text: str
    pos: int


def tokenize(text: str) -> list:
    toks = []
    pos = 0
    while text[pos:].strip():
        m = _TOKEN.match(text, pos)
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(Tok("num", m.group(1), start))
        elif m.group(2):
            toks.append(Tok("id", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*^=;()[],:":
                raise ParseError(f"unexpected character {ch!r}", start, text)
            toks.append(Tok("op", ch, start))
        pos = m.end()
    toks.append(Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, template: bool):
        self.text = text
        self.toks = tokenize(text)
        self.k = 0
        self.template = template

    @property
    def cur(self) -> Tok:
        return self.toks[self.k]

    def peek(self, ahead: int = 1) -> Tok:
        return self.toks[min(self.k + ahead, len(self.toks) - 1)]

    def error(self, msg: str, cls=ParseError):
        raise cls(msg, self.cur.pos, self.text)

    def take(self, text: Optional[str] = None, kind: Optional[str] = None) -> Tok:
        t = self.cur
        if (text is not None and t.text != text) or (kind is not None and t.kind != kind):
            want = repr(text) if text is not None else kind
            self.error(f"expected {want}, found {t.text or 'end of input'!r}")
        self.k += 1
        return t

    def at(self, text: str) -> bool:
        return self.cur.kind in ("op", "id") and self.cur.text == text

    # -- formulas ------------------------------------------------------------

    def formula(self):
        bound = []
        if self.at("exists"):
            self.take()
            while self.cur.kind == "id":
                bound.append(self.take().text)
            if not bound:
                self.error("exists needs at least one variable")
            self.take("(")
            eqs = self.equations()
            self.take(")")
        elif self.at("(") and self._wrapped():
            self.take("(")
            eqs = self.equations()
            self.take(")")
        else:
            eqs = self.equations()
        if self.cur.kind != "end":
            self.error(f"trailing input {self.cur.text!r}")
        if len(set(bound)) != len(bound):
            raise ParseError("repeated bound variable", None, self.text)
        return bound, eqs

    def _wrapped(self) -> bool:
        depth = 0
        for j in range(self.k, len(self.toks)):
            t = self.toks[j]
            if t.text == "(" and t.kind == "op":
                depth += 1
            elif t.text == ")" and t.kind == "op":
                depth -= 1
                if depth == 0:
                    return self.toks[j + 1].kind == "end"
        return False

    def equations(self) -> list:
        eqs = [self.equation()]
        while self.at(";"):
            self.take()
            eqs.append(self.equation())
        return eqs

    def equation(self):
        lhs = self.linear()
        self.take("=")
        rhs = self.linear()
        return lhs, rhs

    def linear(self) -> list:
        terms = []
        sign = 1
        if self.at("-"):
            self.take()
            sign = -1
        elif self.at("+"):
            self.take()
        terms.append(self.term(sign))
        while self.at("+") or self.at("-"):
            sign = 1 if self.take().text == "+" else -1
            terms.append(self.term(sign))
        return terms

    def _is_coef_start(self) -> bool:
        t = self.cur
        if t.kind == "num" or (t.kind == "op" and t.text in "([-"):
            return True
        if t.kind == "id":
            if t.text == "pow" and self.peek().text == "(":
                return True
            if t.text == "p" and self.peek().text == ":":
                return True
            if self.template and t.text == "i":
                return True
        return False

    def term(self, sign: int):
        coefs, var = [], None
        while True:
            if self._is_coef_start():
                coefs.append(self.cfactor())
            elif self.cur.kind == "id":
                if var is not None:
                    self.error("a term may contain only one variable")
                var = self.take().text
            else:
                self.error(f"expected a term, found {self.cur.text or 'end of input'!r}")
            if not self.at("*"):
                break
            self.take()
        coef = ("num", sign)
        for c in coefs:
            coef = ("mul", coef, c)
        return coef, var

    # -- coefficient expressions ----------------------------------------------

    def cfactor(self):
        if self.at("("):
            self.take()
            e = self.cexpr()
            self.take(")")
            return self._maybe_power(e)
        if self.at("-"):
            self.take()
            return ("neg", self.cfactor())
        return self.cpow()

    def cexpr(self):
        e = self.cterm()
        while self.at("+") or self.at("-"):
            op = "add" if self.take().text == "+" else "sub"
            e = (op, e, self.cterm())
        return e

    def cterm(self):
        e = self.cunary()
        while self.at("*"):
            self.take()
            e = ("mul", e, self.cunary())
        return e

    def cunary(self):
        if self.at("-"):
            self.take()
            return ("neg", self.cunary())
        return self.cpow()

    def _maybe_power(self, base):
        if self.at("^"):
            self.take()
            return ("pow", base, self.cunary())
        return base

    def cpow(self):
        return self._maybe_power(self.catom())

    def catom(self):
        t = self.cur
        if t.kind == "num":
            self.take()
            return ("num", int(t.text))
        if t.kind == "id":
            if t.text == "pow" and self.peek().text == "(":
                self.take()
                self.take("(")
                a = self.cexpr()
                self.take(",")
                b = self.cexpr()
                self.take(")")
                return ("pow", a, b)
            if t.text == "p" and self.peek().text == ":":
                self.take()
                self.take(":")
                return ("field", int(self.take(kind="num").text), t.pos)
            if t.text == "i":
                if not self.template:
                    self.error("the stage index i is only allowed in chain templates", UnknownVariable)
                self.take()
                return ("idx",)
            if t.text == "x":
                self.take()
                return ("indet", t.pos)
            self.error(f"unknown name {t.text!r} in a coefficient", UnknownVariable)
        if self.at("(") or self.at("["):
            close = ")" if self.take().text == "(" else "]"
            e = self.cexpr()
            self.take(close)
            return e
        self.error(f"expected a coefficient, found {t.text or 'end of input'!r}")


def _eval(node, ring: RingDescriptor, stage: Optional[int], text: str):
    kind = node[0]
    if kind == "num":
        return node[1] if not ring.is_polynomial else Poly.const(node[1], ring.n)
    if kind == "field":
        if ring.kind not in ("Fp", "Fpx"):
            raise RingLiteralError(f"field literal p:{node[1]} used over {ring}", node[2], text)
        return ring.coerce(node[1])
    if kind == "idx":
        if stage is None:
            raise UnknownVariable("the stage index i is only allowed in chain templates", None, text)
        return stage if not ring.is_polynomial else Poly.const(stage, ring.n)
    if kind == "indet":
        if not ring.is_polynomial:
            raise RingLiteralError(f"polynomial indeterminate used over {ring}", node[1], text)
        return Poly.monomial(1, ring.n)
    if kind == "neg":
        return -_eval(node[1], ring, stage, text)
    a = _eval(node[1], ring, stage, text)
    if kind == "pow":
        e = _eval_int(node[2], stage, text)
        if e < 0:
            raise ParseError("negative exponent", None, text)
        return a**e
    b = _eval(node[2], ring, stage, text)
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    return a * b


def _eval_int(node, stage, text) -> int:
    """Exponents are plain integers whatever the ring."""
    kind = node[0]
    if kind == "num":
        return node[1]
    if kind == "idx":
        if stage is None:
            raise UnknownVariable("the stage index i is only allowed in chain templates", None, text)
        return stage
    if kind == "neg":
        return -_eval_int(node[1], stage, text)
    if kind in ("add", "sub", "mul", "pow"):
        a, b = _eval_int(node[1], stage, text), _eval_int(node[2], stage, text)
        return {"add": a + b, "sub": a - b, "mul": a * b, "pow": a**b if b >= 0 else 0}[kind]
    raise ParseError("exponent must be an integer expression", None, text)


def natural_key(name: str):
    return [int(part) if part.isdigit() else part for part in re.split(r"(\d+)", name)]


@dataclass(frozen=True)
class ParsedFormula:
    """Syntax tree of a formula; :meth:`compile` produces the matrix form."""

    text: str
    bound: tuple
    free: tuple
    equations: tuple

    def compile(self, ring: RingDescriptor, stage: Optional[int] = None) -> PpFormula:
        zero = ring.zero
        a_rows, b_rows = [], []
        bpos = {v: j for j, v in enumerate(self.bound)}
        fpos = {v: j for j, v in enumerate(self.free)}
        for lhs, rhs in self.equations:
            a = [zero] * len(self.bound)
            b = [zero] * len(self.free)
            const = zero
            for side, sgn in ((lhs, 1), (rhs, -1)):
                for coef, var in side:
                    c = ring.reduce(_eval(coef, ring, stage, self.text))
                    if var is None:
                        const = const + sgn * c
                    elif var in bpos:
                        a[bpos[var]] = a[bpos[var]] - sgn * c
                    else:
                        b[fpos[var]] = b[fpos[var]] + sgn * c
            if ring.reduce(const):
                raise ParseError("pp equations cannot have a nonzero constant term", None, self.text)
            a = [ring.reduce(v) for v in a]
            b = [ring.reduce(v) for v in b]
            if any(a) or any(b):
                a_rows.append(a)
                b_rows.append(b)
        return PpFormula(
            ring,
            Mat.from_rows(a_rows, ncols=len(self.bound)),
            Mat.from_rows(b_rows, ncols=len(self.free)),
        )


def parse_tree(text: str, variables: Optional[Sequence[str]] = None, template: bool = False) -> ParsedFormula:
    bound, eqs = _Parser(text, template).formula()
    names = []
    for lhs, rhs in eqs:
        for _, var in lhs + rhs:
            if var is not None and var not in bound and var not in names:
                names.append(var)
    if variables is not None:
        for v in names:
            if v not in variables:
                raise UnknownVariable(f"unknown variable {v!r}", text.find(v), text)
        clash = set(variables) & set(bound)
        if clash:
            raise ParseError(f"variables both free and bound: {sorted(clash)}", None, text)
        free = tuple(variables)
    else:
        free = tuple(sorted(names, key=natural_key))
    return ParsedFormula(text, tuple(bound), free, tuple(eqs))


def parse_formula(text: str, ring: RingDescriptor, variables: Optional[Sequence[str]] = None) -> PpFormula:
    """Compile ``text`` to matrix form; free variables in natural order unless ``variables`` is given."""
    return parse_tree(text, variables).compile(ring)


def parse_template(
    text: str, ring: RingDescriptor, variables: Optional[Sequence[str]] = None
) -> tuple:
    """A stage function ``i -> PpFormula`` and its arity."""
    tree = parse_tree(text, variables, template=True)

    def stage(i: int) -> PpFormula:
        return tree.compile(ring, i)

    return stage, len(tree.free)


def parse_coefficient(text: str, ring: RingDescriptor, stage: Optional[int] = None):
    """A ring element written as a coefficient expression (``i`` allowed when ``stage`` is given)."""
    p = _Parser(text, template=stage is not None)
    node = p.cexpr()
    if p.cur.kind != "end":
        p.error(f"trailing input {p.cur.text!r}")
    return ring.reduce(_eval(node, ring, stage, text))


def _coef_text(c) -> str:
    if isinstance(c, Poly):
        s = format_poly(c)
        return s if c.degree <= 0 else f"[{s}]"
    return str(c)


def _side(terms: list) -> str:
    """``terms`` is a list of ``(coefficient, name)``; zero coefficients already dropped."""
    out = ""
    for c, name in terms:
        neg = isinstance(c, int) and c < 0
        mag = -c if neg else c
        piece = name if mag == 1 else f"{_coef_text(mag)}*{name}"
        if not out:
            out = f"-{piece}" if neg else piece
        else:
            out += f" - {piece}" if neg else f" + {piece}"
    return out or "0"


def variable_names(prefix: str, n: int) -> list:
    return [prefix] if n == 1 else [f"{prefix}{j + 1}" for j in range(n)]


def format_formula(phi: PpFormula, free_names: Optional[Sequence[str]] = None) -> str:
    """Inverse of :func:`parse_formula` up to equivalence; rows may come back negated."""
    xs = list(free_names) if free_names is not None else variable_names("x", phi.arity)
    ys = variable_names("y", phi.bound)
    eqs = []
    for arow, brow in zip(phi.A.rows, phi.B.rows):
        left = [(c, xs[j]) for j, c in enumerate(brow) if c]
        right = [(c, ys[j]) for j, c in enumerate(arow) if c]
        if all(isinstance(c, int) and c < 0 for c, _ in left + right):
            left = [(-c, v) for c, v in left]
            right = [(-c, v) for c, v in right]
        eqs.append([left, right])
    mentioned = {name for eq in eqs for _, name in eq[0]}
    parts = []
    for left, right in eqs:
        if not left and right:
            parts.append(f"{_side(right)} = 0")
        else:
            parts.append(f"{_side(left)} = {_side(right)}")
    # free variables the equations do not mention still fix the arity
    missing = " + ".join(x for x in xs if x not in mentioned)
    if missing:
        parts.append(f"{missing} = {missing}")
    body = " ; ".join(parts)
    if phi.bound:
        return f"exists {' '.join(ys)} ({body})"
    return body


__all__ = [
    "ParsedFormula",
    "format_formula",
    "natural_key",
    "parse_coefficient",
    "parse_formula",
    "parse_template",
    "parse_tree",
    "tokenize",
    "variable_names",
]
