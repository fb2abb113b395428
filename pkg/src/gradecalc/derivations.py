"""Graded derivations u = u^A d_A + u^a d/dc^a of the model ring."""

from __future__ import annotations

from typing import Callable, Sequence

from .core import Element, Monomial, RingSpec, gmul, z2_grade
from .errors import StructureError, ValidationError


def partial_even_monomial(m: Monomial, i: int):
    """d/dx^i of a monomial as (coefficient, monomial), or None."""
    e = m.even[i]
    if not e:
        return None
    even = list(m.even)
    even[i] = e - 1
    return e, Monomial(tuple(even), m.odd)


def partial_odd_monomial(m: Monomial, a: int):
    """Left derivative d/dc^a: strip c^a after moving it to the front."""
    try:
        pos = m.odd.index(a)
    except ValueError:
        return None
    return (-1 if pos & 1 else 1), Monomial(m.even, m.odd[:pos] + m.odd[pos + 1:])


def partial_even(f: Element, i: int) -> Element:
    out = {}
    for m, c in f.terms.items():
        r = partial_even_monomial(m, i)
        if r:
            out[r[1]] = out.get(r[1], 0) + r[0] * c
    return Element(f.ring, out, f.truncated)


def partial_odd(f: Element, a: int) -> Element:
    out = {}
    for m, c in f.terms.items():
        r = partial_odd_monomial(m, a)
        if r:
            out[r[1]] = out.get(r[1], 0) + r[0] * c
    return Element(f.ring, out, f.truncated)


class GradedDerivation:
    """Derivation stored by its coefficients on the generator basis.

    ``even_coeffs[A]`` multiplies d/dx^(A+1) and ``odd_coeffs[a]`` multiplies
    d/dc^(a+1); coefficients always act from the left.
    """

    __slots__ = ("ring", "even_coeffs", "odd_coeffs")

    def __init__(self, ring: RingSpec, even_coeffs: Sequence[Element] = (), odd_coeffs: Sequence[Element] = ()):
        even_coeffs = tuple(even_coeffs) or tuple(ring.zero() for _ in range(ring.n_even))
        odd_coeffs = tuple(odd_coeffs) or tuple(ring.zero() for _ in range(ring.n_odd))
        if len(even_coeffs) != ring.n_even or len(odd_coeffs) != ring.n_odd:
            raise ValidationError("derivation needs one coefficient per generator")
        for e in even_coeffs + odd_coeffs:
            ring.check_same(e.ring)
        self.ring = ring
        self.even_coeffs = even_coeffs
        self.odd_coeffs = odd_coeffs

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, ring):
        return cls(ring)

    @classmethod
    def partial_x(cls, ring, i: int, coeff: Element | None = None):
        """coeff * d/dx^i (1-based)."""
        if not 1 <= i <= ring.n_even:
            raise ValidationError(f"no even generator x{i}")
        ev = [ring.zero()] * ring.n_even
        ev[i - 1] = coeff if coeff is not None else ring.one()
        return cls(ring, ev, ())

    @classmethod
    def partial_c(cls, ring, a: int, coeff: Element | None = None):
        """coeff * d/dc^a (1-based)."""
        if not 1 <= a <= ring.n_odd:
            raise ValidationError(f"no odd generator c{a}")
        od = [ring.zero()] * ring.n_odd
        od[a - 1] = coeff if coeff is not None else ring.one()
        return cls(ring, (), od)

    @classmethod
    def from_values(cls, ring, fn: Callable[[Element], Element]):
        """Read off coefficients of any derivation-like map from its values
        on the generators."""
        gens = ring.generators()
        vals = [fn(g) for g in gens]
        return cls(ring, vals[: ring.n_even], vals[ring.n_even:])

    # -- protocol -----------------------------------------------------------

    def coeffs(self) -> tuple:
        return self.even_coeffs + self.odd_coeffs

    def __eq__(self, other):
        if not isinstance(other, GradedDerivation):
            return NotImplemented
        return self.ring == other.ring and self.coeffs() == other.coeffs()

    def __hash__(self):
        return hash(self.coeffs())

    def __bool__(self):
        return any(self.coeffs())

    def __str__(self):
        parts = []
        for i, e in enumerate(self.even_coeffs):
            if e:
                parts.append(f"({e})*Dx{i + 1}")
        for a, e in enumerate(self.odd_coeffs):
            if e:
                parts.append(f"({e})*Dc{a + 1}")
        return " + ".join(parts) or "0"

    __repr__ = __str__

    def _zip(self, other, op):
        self.ring.check_same(other.ring)
        return GradedDerivation(
            self.ring,
            [op(a, b) for a, b in zip(self.even_coeffs, other.even_coeffs)],
            [op(a, b) for a, b in zip(self.odd_coeffs, other.odd_coeffs)],
        )

    def __add__(self, other):
        return self._zip(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._zip(other, lambda a, b: a - b)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, q):
        return GradedDerivation(self.ring, [e.scale(q) for e in self.even_coeffs],
                                [e.scale(q) for e in self.odd_coeffs])

    def left_mul(self, a: Element) -> "GradedDerivation":
        """The derivation a*u."""
        return GradedDerivation(self.ring, [gmul(a, e) for e in self.even_coeffs],
                                [gmul(a, e) for e in self.odd_coeffs])

    # -- grading ------------------------------------------------------------

    def homogeneous_parts(self) -> dict[int, "GradedDerivation"]:
        """Z2-homogeneous parts keyed by parity; absent keys are zero."""
        ev_parts = [z2_grade(e) for e in self.even_coeffs]
        od_parts = [z2_grade(e) for e in self.odd_coeffs]
        out = {}
        for p in (0, 1):
            # even generators keep the coefficient parity, odd ones flip it
            u = GradedDerivation(self.ring, [ep[p] for ep in ev_parts], [op[1 - p] for op in od_parts])
            if u:
                out[p] = u
        return out

    def parity(self) -> int | None:
        parts = self.homogeneous_parts()
        if len(parts) > 1:
            return None
        return next(iter(parts), 0)

    def degree_shifts(self) -> set[int]:
        ring = self.ring
        shifts = set()
        for i, e in enumerate(self.even_coeffs):
            shifts.update(ring.degree(m) - ring.even_weights[i] for m in e.terms)
        for a, e in enumerate(self.odd_coeffs):
            shifts.update(ring.degree(m) - ring.odd_weights[a] for m in e.terms)
        return shifts

    def __call__(self, f: Element) -> Element:
        return apply(self, f)


def apply(u: GradedDerivation, f: Element) -> Element:
    u.ring.check_same(f.ring)
    out = u.ring.zero().with_flag(f.truncated)
    for i, coef in enumerate(u.even_coeffs):
        if coef:
            d = partial_even(f, i)
            if d:
                out = out + gmul(coef, d)
    for a, coef in enumerate(u.odd_coeffs):
        if coef:
            d = partial_odd(f, a)
            if d:
                out = out + gmul(coef, d)
    return out


def superbracket(u: GradedDerivation, v: GradedDerivation) -> GradedDerivation:
    """[u, v] = u∘v - (-1)^{[u][v]} v∘u, extended bilinearly over parity parts."""
    u.ring.check_same(v.ring)
    ring = u.ring
    gens = ring.generators()
    total = GradedDerivation.zero(ring)
    for pu, uu in u.homogeneous_parts().items():
        for pv, vv in v.homogeneous_parts().items():
            sign = -1 if pu * pv else 1
            vals = []
            for k, g in enumerate(gens):
                ug = (uu.even_coeffs + uu.odd_coeffs)[k]
                vg = (vv.even_coeffs + vv.odd_coeffs)[k]
                vals.append(apply(uu, vg) - apply(vv, ug).scale(sign))
            total = total + GradedDerivation(ring, vals[: ring.n_even], vals[ring.n_even:])
    return total


def check_leibniz(u: GradedDerivation, a: Element, b: Element) -> bool:
    """u(ab) == u(a) b + (-1)^{[a][u]} a u(b), for homogeneous u."""
    pu = u.parity()
    if pu is None:
        raise StructureError("check_leibniz needs a homogeneous derivation")
    lhs = apply(u, gmul(a, b))
    rhs = a.ring.zero()
    for pa, part in enumerate(z2_grade(a)):
        if not part:
            continue
        sign = -1 if pa * pu else 1
        rhs = rhs + gmul(apply(u, part), b) + gmul(part, apply(u, b)).scale(sign)
    return lhs == rhs


def jacobi_sum(u: GradedDerivation, v: GradedDerivation, w: GradedDerivation) -> GradedDerivation:
    """Signed cyclic sum of the graded Jacobi identity for homogeneous u, v, w."""
    pu, pv, pw = u.parity(), v.parity(), w.parity()
    if None in (pu, pv, pw):
        raise StructureError("jacobi_sum needs homogeneous derivations")
    s = lambda p, q: -1 if p * q else 1
    return (superbracket(u, superbracket(v, w)).scale(s(pu, pw))
            + superbracket(v, superbracket(w, u)).scale(s(pv, pu))
            + superbracket(w, superbracket(u, v)).scale(s(pw, pv)))
