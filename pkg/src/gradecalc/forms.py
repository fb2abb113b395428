"""
Graded exterior forms over the model ring.

Forms live in the free bigraded algebra on dx^A (bidegree (1,0)) and dc^a
(bidegree (1,1)) over A, with coefficients written on the left.  Moving a
generator g past h costs (-1)^{|g||h| + [g][h]}, where (|x|,[x]) = (0,0)
and (|c|,[c]) = (0,1).  That single rule fixes every sign below.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple

from .core import Element, RingSpec, format_terms, koszul_sign, merge_odd, _q
from .derivations import GradedDerivation, partial_even_monomial, partial_odd_monomial
from .errors import StructureError


class FormMonomial(NamedTuple):
    dx: tuple  # strictly ascending
    dc: tuple  # non-decreasing, repeats allowed

    @property
    def degree(self) -> int:
        return len(self.dx) + len(self.dc)

    def fmt(self) -> str:
        parts = [f"dx{i + 1}" for i in self.dx]
        k = 0
        while k < len(self.dc):
            a = self.dc[k]
            r = self.dc.count(a)
            parts.append(f"dc{a + 1}" if r == 1 else f"dc{a + 1}^{r}")
            k += r
        return "*".join(parts)


EMPTY = FormMonomial((), ())


def mul_keys(ring: RingSpec, k1, k2):
    """Product of two basis terms (monomial, form monomial).

    Returns (sign, key), (0, None) if the product vanishes, or
    (None, None) if it overflows the truncation.
    """
    (m1, f1), (m2, f2) = k1, k2
    if sum(m1.even) + sum(m2.even) > ring.trunc:
        return None, None
    sign = 1
    ndc = len(f1.dc) & 1
    if ndc and (len(m2.odd) + len(f2.dx)) & 1:
        sign = -sign
    s, m = koszul_sign(m1, m2)
    if not s:
        return 0, None
    s2, dx = merge_odd(f1.dx, f2.dx)
    if not s2:
        return 0, None
    dc = f1.dc + f2.dc
    if f1.dc and f2.dc and f1.dc[-1] > f2.dc[0]:
        dc = tuple(sorted(dc))
    return sign * s * s2, (m, FormMonomial(dx, dc))


class Form:
    """Immutable sparse form; ``terms`` maps (Monomial, FormMonomial) to a
    nonzero Fraction."""

    __slots__ = ("ring", "terms", "truncated")

    def __init__(self, ring: RingSpec, terms: dict | None = None, truncated: bool = False):
        self.ring = ring
        self.terms = {k: c for k, c in (terms or {}).items() if c}
        self.truncated = truncated

    @classmethod
    def from_element(cls, e: Element) -> "Form":
        return cls(e.ring, {(m, EMPTY): c for m, c in e.terms.items()}, e.truncated)

    @classmethod
    def dx(cls, ring: RingSpec, i: int) -> "Form":
        """dx^i, 1-based."""
        ring.x(i)
        return cls(ring, {(ring.unit_monomial(), FormMonomial((i - 1,), ())): Fraction(1)})

    @classmethod
    def dc(cls, ring: RingSpec, a: int) -> "Form":
        """dc^a, 1-based."""
        ring.c(a)
        return cls(ring, {(ring.unit_monomial(), FormMonomial((), (a - 1,))): Fraction(1)})

    @classmethod
    def coerce(cls, value, ring: RingSpec | None = None) -> "Form":
        if isinstance(value, Form):
            return value
        if isinstance(value, Element):
            return cls.from_element(value)
        if isinstance(value, (int, Fraction)) and ring is not None:
            return cls.from_element(ring.scalar(value))
        raise TypeError(f"cannot use {type(value).__name__} as a form")

    # -- protocol -----------------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (Element, int, Fraction)):
            other = Form.coerce(other, self.ring)
        if not isinstance(other, Form):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def __repr__(self):
        return f"Form({self})"

    def __str__(self):
        items = []
        for (m, f), c in sorted(self.terms.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            text = "*".join(t for t in (m.fmt(), f.fmt()) if t)
            items.append((text, c))
        return format_terms(items)

    def __add__(self, other):
        other = Form.coerce(other, self.ring)
        self.ring.check_same(other.ring)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, 0) + c
        return Form(self.ring, terms, self.truncated or other.truncated)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-Form.coerce(other, self.ring))

    def __rsub__(self, other):
        return Form.coerce(other, self.ring) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return wedge(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return wedge(Form.coerce(other, self.ring), self)

    def __pow__(self, k: int):
        out = Form.from_element(self.ring.one())
        for _ in range(k):
            out = wedge(out, self)
        return out

    def scale(self, q) -> "Form":
        q = _q(q)
        return Form(self.ring, {k: q * c for k, c in self.terms.items()}, self.truncated)

    # -- inspection ---------------------------------------------------------

    def coefficient_map(self) -> dict[FormMonomial, Element]:
        out: dict = {}
        for (m, f), c in self.terms.items():
            out.setdefault(f, {})[m] = c
        return {f: Element(self.ring, t, self.truncated) for f, t in out.items()}

    def form_degree(self) -> int | None:
        ds = {f.degree for _, f in self.terms}
        if len(ds) > 1:
            return None
        return ds.pop() if ds else 0

    def parity(self) -> int | None:
        ps = {(len(m.odd) + len(f.dc)) & 1 for m, f in self.terms}
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def bidegree(self) -> tuple[int, int] | None:
        d, p = self.form_degree(), self.parity()
        if d is None or p is None:
            return None
        return d, p

    def homogeneous_parts(self) -> dict[tuple[int, int], "Form"]:
        out: dict = {}
        for (m, f), c in self.terms.items():
            key = (f.degree, (len(m.odd) + len(f.dc)) & 1)
            out.setdefault(key, {})[(m, f)] = c
        return {k: Form(self.ring, v, self.truncated) for k, v in sorted(out.items())}

    def weight(self, key) -> int:
        m, f = key
        ring = self.ring
        return (ring.degree(m) + sum(ring.even_weights[i] for i in f.dx)
                + sum(ring.odd_weights[a] for a in f.dc))

    def is_function(self) -> bool:
        return all(f == EMPTY for _, f in self.terms)

    def to_element(self) -> Element:
        if not self.is_function():
            raise StructureError("form has positive degree")
        return Element(self.ring, {m: c for (m, _), c in self.terms.items()}, self.truncated)


def wedge(phi, psi) -> Form:
    phi = Form.coerce(phi)
    psi = Form.coerce(psi, phi.ring)
    phi.ring.check_same(psi.ring)
    ring = phi.ring
    flag = phi.truncated or psi.truncated
    out: dict = {}
    for k1, c1 in phi.terms.items():
        for k2, c2 in psi.terms.items():
            s, k = mul_keys(ring, k1, k2)
            if s is None:
                flag = True
            elif s:
                out[k] = out.get(k, 0) + s * c1 * c2
    return Form(ring, out, flag)


def exterior_d(phi) -> Form:
    """d phi = dx^A ∧ d_A phi + dc^a ∧ (d/dc^a) phi, derivatives hitting the
    left coefficients."""
    phi = Form.coerce(phi)
    ring = phi.ring
    unit = ring.unit_monomial()
    out: dict = {}
    flag = phi.truncated
    for (m, f), c in phi.terms.items():
        for i in range(ring.n_even):
            r = partial_even_monomial(m, i)
            if r:
                s, k = mul_keys(ring, (unit, FormMonomial((i,), ())), (r[1], f))
                if s:
                    out[k] = out.get(k, 0) + s * r[0] * c
        for a in m.odd:
            r = partial_odd_monomial(m, a)
            s, k = mul_keys(ring, (unit, FormMonomial((), (a,))), (r[1], f))
            if s:
                out[k] = out.get(k, 0) + s * r[0] * c
    return Form(ring, out, flag)


def _generator_sequence(f: FormMonomial):
    return [("dx", i) for i in f.dx] + [("dc", a) for a in f.dc]


def _seq_key(ring, gens):
    dx = tuple(i for kind, i in gens if kind == "dx")
    dc = tuple(a for kind, a in gens if kind == "dc")
    return ring.unit_monomial(), FormMonomial(dx, dc)


def interior(u: GradedDerivation, phi) -> Form:
    """Interior product: the derivation of bidegree (-1, [u]) with
    u⌋dx^A = u^A, u⌋dc^a = u^a and u⌋(b φ) = (-1)^{[u][b]} b (u⌋φ)."""
    phi = Form.coerce(phi, u.ring)
    ring = phi.ring
    ring.check_same(u.ring)
    total = Form(ring, {}, phi.truncated)
    for pu, uu in u.homogeneous_parts().items():
        out = Form(ring)
        for (m, f), c in phi.terms.items():
            if not f.degree:
                continue
            sign0 = -1 if pu and (len(m.odd) & 1) else 1
            gens = _generator_sequence(f)
            eps = sign0
            for t, (kind, idx) in enumerate(gens):
                coef = uu.even_coeffs[idx] if kind == "dx" else uu.odd_coeffs[idx]
                if coef:
                    # gens[:t] and gens[t+1:] are already in canonical order
                    prefix = Form(ring, {(m, _seq_key(ring, gens[:t])[1]): c * eps})
                    suffix = Form(ring, {_seq_key(ring, gens[t + 1:]): Fraction(1)})
                    out = out + wedge(wedge(prefix, Form.from_element(coef)), suffix)
                # passing g_t costs (-1)^{|g| + [g][u]}
                if not (kind == "dc" and pu):
                    eps = -eps
        total = total + out
    return total


def lie_derivative(u: GradedDerivation, phi) -> Form:
    phi = Form.coerce(phi, u.ring)
    return interior(u, exterior_d(phi)) + exterior_d(interior(u, phi))
