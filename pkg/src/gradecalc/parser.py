"""
Recursive-descent parser for the expression language.

    expr     := ['-'] term (('+' | '-') term)*
    term     := factor ('*' factor)*
    factor   := atom ('^' posint)*
    atom     := rational | gen | 'd(' expr ')' | '(' expr ')'
    gen      := 'x' int | 'c' int | 'dx' int | 'dc' int
    rational := int ['/' posint]

Functions and forms share one algebra, so '*' is the graded product and
the wedge at once.  The result is an Element unless a form generator or
d(...) occurs.  Derivations ("(x1)*Dx1 + Dc2") and operator payloads
("Dx1 o Dx1 + mul(x2)") use the same tokens.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .core import Element, RingSpec
from .derivations import GradedDerivation
from .errors import ParseError, TruncationError, ValidationError
from .forms import Form, exterior_d

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<gen>(?:dx|dc|Dx|Dc|x|c)\d+)
  | (?P<int>\d+)
  | (?P<word>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


@dataclass
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        if m.lastgroup != "ws":
            out.append(Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    out.append(Token("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, ring: RingSpec, text: str):
        self.ring = ring
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.is_form = False

    # -- token helpers ------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return ParseError(msg, self.text, tok.pos)

    def accept(self, text) -> Token | None:
        if self.tok.text == text and self.tok.kind in ("op", "word"):
            t = self.tok
            self.i += 1
            return t
        return None

    def expect(self, text) -> Token:
        t = self.accept(text)
        if t is None:
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return t

    def posint(self) -> int:
        if self.tok.kind != "int":
            raise self.error("expected a positive integer")
        t = self.tok
        self.i += 1
        v = int(t.text)
        if v <= 0:
            raise self.error("expected a positive integer", t)
        return v

    def finish(self):
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}")

    # -- grammar ------------------------------------------------------------

    def expr(self) -> Form:
        neg = self.accept("-") is not None
        val = self.term()
        if neg:
            val = -val
        while True:
            if self.accept("+"):
                val = val + self.term()
            elif self.accept("-"):
                val = val - self.term()
            else:
                return val

    def term(self) -> Form:
        val = self.factor()
        while True:
            t = self.accept("*")
            if t is None:
                return val
            rhs = self.factor()
            val = self._checked(val * rhs, val, rhs, t)

    def factor(self) -> Form:
        val = self.atom()
        while True:
            t = self.accept("^")
            if t is None:
                return val
            k = self.posint()
            val = self._checked(val ** k, val, val, t)

    def _checked(self, result, a, b, tok):
        if result.truncated and not (a.truncated or b.truncated):
            raise TruncationError(
                f"product exceeds truncation degree {self.ring.trunc} "
                f"(line {_line(self.text, tok.pos)}, column {_col(self.text, tok.pos)})")
        return result

    def rational(self) -> Fraction:
        num = int(self.tok.text)
        self.i += 1
        if self.accept("/"):
            return Fraction(num, self.posint())
        return Fraction(num)

    def atom(self) -> Form:
        t = self.tok
        if t.kind == "int":
            return Form.from_element(self.ring.scalar(self.rational()))
        if t.kind == "gen":
            self.i += 1
            return self.generator(t)
        if self.accept("("):
            val = self.expr()
            self.expect(")")
            return val
        if t.kind == "word" and t.text == "d":
            self.i += 1
            self.expect("(")
            val = self.expr()
            self.expect(")")
            self.is_form = True
            return exterior_d(val)
        found = t.text or "end of input"
        raise self.error(f"unexpected {found!r}")

    def generator(self, t: Token) -> Form:
        m = re.fullmatch(r"(dx|dc|Dx|Dc|x|c)(\d+)", t.text)
        kind, idx = m.group(1), int(m.group(2))
        bound = self.ring.n_even if kind in ("x", "dx") else self.ring.n_odd
        if kind in ("Dx", "Dc"):
            raise self.error(f"{t.text} is a derivation, not a ring element", t)
        if not 1 <= idx <= bound:
            raise self.error(f"unknown generator {t.text}", t)
        if kind == "x":
            return Form.from_element(self.ring.x(idx))
        if kind == "c":
            return Form.from_element(self.ring.c(idx))
        self.is_form = True
        return Form.dx(self.ring, idx) if kind == "dx" else Form.dc(self.ring, idx)

    # -- derivations --------------------------------------------------------

    def derivation(self) -> GradedDerivation:
        total = GradedDerivation.zero(self.ring)
        sign = -1 if self.accept("-") else 1
        while True:
            total = total + self.derivation_term().scale(sign)
            if self.accept("+"):
                sign = 1
            elif self.accept("-"):
                sign = -1
            else:
                return total

    def derivation_term(self) -> GradedDerivation:
        coef = self.ring.one()
        if self.tok.kind != "gen" or not self.tok.text.startswith("D"):
            start = self.tok
            val = self.factor()
            if self.is_form:
                raise self.error("derivation coefficients must be functions", start)
            coef = val.to_element()
            self.expect("*")
        t = self.tok
        m = re.fullmatch(r"(Dx|Dc)(\d+)", t.text) if t.kind == "gen" else None
        if m is None:
            raise self.error("expected Dx<i> or Dc<a>")
        self.i += 1
        idx = int(m.group(2))
        try:
            if m.group(1) == "Dx":
                return GradedDerivation.partial_x(self.ring, idx, coef)
            return GradedDerivation.partial_c(self.ring, idx, coef)
        except ValidationError:
            raise self.error(f"unknown generator {t.text}", t) from None


def _line(text, pos):
    return text.count("\n", 0, pos) + 1


def _col(text, pos):
    return pos - (text.rfind("\n", 0, pos) + 1) + 1


def parse(ring: RingSpec, text: str) -> Element | Form:
    """Parse ``text``; returns an Element unless form generators occur."""
    p = _Parser(ring, text)
    val = p.expr()
    p.finish()
    return val if p.is_form else val.to_element()


def parse_element(ring: RingSpec, text: str) -> Element:
    val = parse(ring, text)
    if isinstance(val, Form):
        raise ParseError("expected a function, got a form", text, 0)
    return val


def parse_form(ring: RingSpec, text: str) -> Form:
    return Form.coerce(parse(ring, text), ring)


def parse_derivation(ring: RingSpec, text: str) -> GradedDerivation:
    p = _Parser(ring, text)
    u = p.derivation()
    p.finish()
    return u


def parse_operator(ring: RingSpec, text: str, rank: int = 1):
    """Operator payloads: sums and ' o '-compositions of Dx<i>, Dc<a>, id,
    mul(expr), proj(k) and bracketed sub-expressions, with optional
    rational factors (``2*Dx1 o Dx1 - mul(x1)``).  A derivation may carry a
    function coefficient as in ``(x1 + c1)*Dc1``."""
    from .diffops import LinearOperator

    p = _Parser(ring, text)

    def op_expr():
        sign = -1 if p.accept("-") else 1
        val = op_term().scale(sign)
        while True:
            if p.accept("+"):
                val = val + op_term()
            elif p.accept("-"):
                val = val - op_term()
            else:
                return val

    def op_term():
        q = Fraction(1)
        if p.tok.kind == "int":
            q = p.rational()
            p.expect("*")
        val = op_atom()
        while p.accept("o"):
            val = val @ op_atom()
        return val.scale(q) if q != 1 else val

    def op_atom():
        t = p.tok
        if t.text == "(":
            # either a bracketed operator or the coefficient of a derivation
            mark = p.i
            try:
                p.i += 1
                val = op_expr()
                p.expect(")")
                return val
            except ParseError:
                p.i, p.is_form = mark, False
                return LinearOperator.derivation(p.derivation_term(), rank)
        if p.accept("id"):
            return LinearOperator.identity(ring, rank)
        if p.accept("mul"):
            p.expect("(")
            start = p.tok
            val = p.expr()
            p.expect(")")
            if p.is_form:
                raise p.error("mul() takes a function", start)
            return LinearOperator.multiplication(val.to_element(), rank)
        if p.accept("proj"):
            p.expect("(")
            if p.tok.kind != "int":
                raise p.error("expected a degree")
            k = int(p.tok.text)
            p.i += 1
            p.expect(")")
            return LinearOperator.projection(ring, k, rank)
        if t.kind in ("gen", "int"):
            return LinearOperator.derivation(p.derivation_term(), rank)
        raise p.error(f"unexpected {t.text or 'end of input'!r} in operator")

    op = op_expr()
    p.finish()
    op.label = text.strip()
    return op
