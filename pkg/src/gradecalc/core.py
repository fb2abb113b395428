"""
Sparse exact arithmetic in A = Q[x1..xn] (x) Lambda(c1..cm).

Monomials are canonical: even exponents as a tuple, odd generators as a
strictly ascending index tuple.  Every sign in the package comes from
reordering odd factors into that position (see ``koszul_sign``).
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import NamedTuple, Sequence

from .errors import StructureError, ValidationError


def _q(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"not an exact scalar: {value!r}")


def _weights(value, count, label):
    if isinstance(value, int):
        return (value,) * count
    value = tuple(value)
    if len(value) != count:
        raise ValidationError(f"{label} needs {count} entries, got {len(value)}")
    return value


@dataclass(frozen=True)
class RingSpec:
    """Shape of the model ring.

    ``even_weight``/``odd_weight`` may be a single int or one entry per
    generator.  ``trunc`` bounds the total polynomial degree in the even
    generators.  ``laurent`` only marks the flagged circle extension used by
    the cohomology witness; ordinary arithmetic ignores it.
    """

    n_even: int = 0
    n_odd: int = 0
    even_weight: int | tuple = 2
    odd_weight: int | tuple = 1
    trunc: int = 8
    laurent: bool = False
    even_weights: tuple = field(init=False, repr=False, compare=False)
    odd_weights: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n_even < 0 or self.n_odd < 0 or self.trunc < 0:
            raise ValidationError("generator counts and trunc must be non-negative")
        ew = _weights(self.even_weight, self.n_even, "even_weight")
        ow = _weights(self.odd_weight, self.n_odd, "odd_weight")
        if any(w < 1 for w in ew + ow):
            raise ValidationError("generator weights must be positive")
        # odd generators must sit in odd N-degree; even ones may use weight 1
        # to model polynomial rings generated in degree 1
        if any(w % 2 == 0 for w in ow):
            raise ValidationError("odd generators need odd weight")
        if isinstance(self.even_weight, list):
            object.__setattr__(self, "even_weight", tuple(self.even_weight))
        if isinstance(self.odd_weight, list):
            object.__setattr__(self, "odd_weight", tuple(self.odd_weight))
        object.__setattr__(self, "even_weights", ew)
        object.__setattr__(self, "odd_weights", ow)

    # -- constructors -------------------------------------------------------

    def zero(self) -> "Element":
        return Element(self, {})

    def one(self) -> "Element":
        return Element(self, {self.unit_monomial(): Fraction(1)})

    def scalar(self, value) -> "Element":
        return Element(self, {self.unit_monomial(): _q(value)})

    def x(self, i: int) -> "Element":
        """Even generator x^i, 1-based."""
        if not 1 <= i <= self.n_even:
            raise ValidationError(f"x{i} outside ring with {self.n_even} even generators")
        exps = [0] * self.n_even
        exps[i - 1] = 1
        return Element.from_monomial(self, Monomial(tuple(exps), ()))

    def c(self, a: int) -> "Element":
        """Odd generator c^a, 1-based."""
        if not 1 <= a <= self.n_odd:
            raise ValidationError(f"c{a} outside ring with {self.n_odd} odd generators")
        return Element.from_monomial(self, Monomial((0,) * self.n_even, (a - 1,)))

    def monomial(self, even=None, odd=(), coeff=1) -> "Element":
        """Build ``coeff * x^even * c^odd[0] * c^odd[1] ...`` (0-based odd
        indices, any order).  The reordering sign is folded into the
        coefficient; a repeated odd index gives zero."""
        even = tuple(even) if even is not None else (0,) * self.n_even
        if len(even) != self.n_even or any(e < 0 for e in even):
            raise ValidationError(f"bad even exponent vector {even}")
        sign, odd_sorted = sort_odd(odd)
        if sign == 0:
            return self.zero()
        m = Monomial(even, odd_sorted)
        if sum(even) > self.trunc:
            return Element(self, {}, truncated=True)
        return Element(self, {m: sign * _q(coeff)})

    def unit_monomial(self) -> "Monomial":
        return Monomial((0,) * self.n_even, ())

    def generators(self) -> list["Element"]:
        return [self.x(i) for i in range(1, self.n_even + 1)] + [
            self.c(a) for a in range(1, self.n_odd + 1)
        ]

    # -- degree bookkeeping -------------------------------------------------

    def degree(self, m: "Monomial") -> int:
        return sum(w * e for w, e in zip(self.even_weights, m.even)) + sum(
            self.odd_weights[a] for a in m.odd
        )

    def basis(self, max_even_degree: int | None = None) -> list["Monomial"]:
        """All monomials with total even degree <= trunc, canonical order."""
        top = self.trunc if max_even_degree is None else max_even_degree
        evens = [e for e in product(range(top + 1), repeat=self.n_even) if sum(e) <= top]
        odds = [o for k in range(self.n_odd + 1) for o in combinations(range(self.n_odd), k)]
        return sorted(Monomial(e, o) for e in evens for o in odds)

    def monomials_of_weight(self, w: int) -> list["Monomial"]:
        """Monomials of exact N-degree ``w`` (ignores trunc)."""
        out = []
        odds = [o for k in range(self.n_odd + 1) for o in combinations(range(self.n_odd), k)]
        for o in odds:
            rest = w - sum(self.odd_weights[a] for a in o)
            if rest < 0:
                continue
            for e in _exponents_of_weight(self.even_weights, rest):
                out.append(Monomial(e, o))
        return sorted(out)

    def check_same(self, other: "RingSpec"):
        if self != other:
            raise StructureError(f"ring mismatch: {self} vs {other}")


def _exponents_of_weight(weights, w):
    if not weights:
        if w == 0:
            yield ()
        return
    head, rest = weights[0], weights[1:]
    for k in range(w // head + 1):
        for tail in _exponents_of_weight(rest, w - k * head):
            yield (k,) + tail


class Monomial(NamedTuple):
    even: tuple
    odd: tuple

    @property
    def parity(self) -> int:
        return len(self.odd) & 1

    @property
    def even_degree(self) -> int:
        return sum(self.even)

    def fmt(self) -> str:
        parts = []
        for i, e in enumerate(self.even):
            if e == 1:
                parts.append(f"x{i + 1}")
            elif e > 1:
                parts.append(f"x{i + 1}^{e}")
        parts.extend(f"c{a + 1}" for a in self.odd)
        return "*".join(parts)


def sort_odd(indices: Sequence[int]) -> tuple[int, tuple]:
    """Sort odd indices ascending; return (sign, sorted) or (0, ()) on repeats."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return 0, ()
    inversions = sum(1 for i, j in combinations(range(len(idx)), 2) if idx[i] > idx[j])
    return (-1 if inversions & 1 else 1), tuple(sorted(idx))


def merge_odd(o1: tuple, o2: tuple) -> tuple[int, tuple]:
    """Shuffle two ascending odd tuples; (0, ()) if they share an index."""
    if not o1:
        return 1, o2
    if not o2:
        return 1, o1
    if not set(o1).isdisjoint(o2):
        return 0, ()
    n1 = len(o1)
    inv = 0
    for b in o2:
        inv += n1 - bisect_right(o1, b)
    return (-1 if inv & 1 else 1), tuple(sorted(o1 + o2))


def koszul_sign(m1: Monomial, m2: Monomial, ring: RingSpec | None = None) -> tuple[int, Monomial | None]:
    """Sign and canonical monomial of the product ``m1 * m2``.

    Returns ``(0, None)`` when the odd parts overlap.
    """
    if len(m1.even) != len(m2.even):
        raise StructureError("monomials from different rings")
    if ring is not None and len(m1.even) != ring.n_even:
        raise StructureError("monomial does not belong to ring")
    sign, odd = merge_odd(m1.odd, m2.odd)
    if sign == 0:
        return 0, None
    return sign, Monomial(tuple(a + b for a, b in zip(m1.even, m2.even)), odd)


class Element:
    """Immutable sparse element of the model ring.

    ``truncated`` records that some product overflowed ``ring.trunc`` and
    terms were dropped along the way; it is sticky under arithmetic and
    is not part of equality.
    """

    __slots__ = ("ring", "terms", "truncated")

    def __init__(self, ring: RingSpec, terms: dict | None = None, truncated: bool = False):
        self.ring = ring
        self.terms = {m: c for m, c in (terms or {}).items() if c}
        self.truncated = truncated

    @classmethod
    def from_monomial(cls, ring, m: Monomial, coeff=1) -> "Element":
        return cls(ring, {m: _q(coeff)})

    # -- basic protocol -----------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.scalar(other)
        if not isinstance(other, Element):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def __repr__(self):
        return f"Element({self})"

    def __str__(self):
        return format_terms(
            (m.fmt(), c) for m, c in sorted(self.terms.items())
        )

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "Element":
        if isinstance(other, Element):
            self.ring.check_same(other.ring)
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.scalar(other)
        raise TypeError(f"cannot combine Element with {type(other).__name__}")

    def __add__(self, other):
        if not isinstance(other, (Element, int, Fraction)):
            return NotImplemented
        other = self._coerce(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, 0) + c
        return Element(self.ring, terms, self.truncated or other.truncated)

    __radd__ = __add__

    def __neg__(self):
        return Element(self.ring, {m: -c for m, c in self.terms.items()}, self.truncated)

    def __sub__(self, other):
        if not isinstance(other, (Element, int, Fraction)):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, Element):
            return gmul(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not defined")
        out = self.ring.one()
        for _ in range(k):
            out = gmul(out, self)
        return out

    def scale(self, q) -> "Element":
        q = _q(q)
        return Element(self.ring, {m: q * c for m, c in self.terms.items()}, self.truncated)

    def with_flag(self, flag: bool) -> "Element":
        return Element(self.ring, self.terms, self.truncated or flag)

    # -- inspection ---------------------------------------------------------

    def coefficient(self, m: Monomial) -> Fraction:
        return self.terms.get(m, Fraction(0))

    def parity(self) -> int | None:
        """Z2-degree if homogeneous (0 for the zero element), else None."""
        ps = {m.parity for m in self.terms}
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def degree(self) -> int | None:
        """N-degree if homogeneous (0 for the zero element), else None."""
        ds = {self.ring.degree(m) for m in self.terms}
        if len(ds) > 1:
            return None
        return ds.pop() if ds else 0

    def max_even_degree(self) -> int:
        return max((m.even_degree for m in self.terms), default=0)


def format_terms(items) -> str:
    """Render ``(monomial_text, coefficient)`` pairs in parser syntax."""
    out = []
    for text, c in items:
        neg = c < 0
        mag = -c if neg else c
        if not text:
            body = str(mag)
        elif mag == 1:
            body = text
        else:
            body = f"{mag}*{text}"
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out) if out else "0"


def gmul(a: Element, b: Element) -> Element:
    """Graded product; overflow past ``trunc`` is dropped and flagged."""
    a.ring.check_same(b.ring)
    trunc = a.ring.trunc
    flag = a.truncated or b.truncated
    out: dict = {}
    for m1, c1 in a.terms.items():
        d1 = sum(m1.even)
        for m2, c2 in b.terms.items():
            if d1 + sum(m2.even) > trunc:
                flag = True
                continue
            sign, m = koszul_sign(m1, m2)
            if sign == 0:
                continue
            out[m] = out.get(m, 0) + sign * c1 * c2
    return Element(a.ring, out, flag)


def grade(a: Element) -> dict[int, Element]:
    """Split into N-homogeneous parts, keyed by degree."""
    parts: dict[int, dict] = {}
    for m, c in a.terms.items():
        parts.setdefault(a.ring.degree(m), {})[m] = c
    return {k: Element(a.ring, v, a.truncated) for k, v in sorted(parts.items())}


def z2_grade(a: Element) -> tuple[Element, Element]:
    even = {m: c for m, c in a.terms.items() if not m.parity}
    odd = {m: c for m, c in a.terms.items() if m.parity}
    return Element(a.ring, even, a.truncated), Element(a.ring, odd, a.truncated)


def body(a: Element) -> Fraction:
    return a.coefficient(a.ring.unit_monomial())


def soul(a: Element) -> Element:
    unit = a.ring.unit_monomial()
    return Element(a.ring, {m: c for m, c in a.terms.items() if m != unit}, a.truncated)


@dataclass(frozen=True)
class Substitution:
    """Ring endomorphism given by images of the generators.

    Validated on construction: odd images square to zero and pairwise
    anticommute, even images commute with every image.
    """

    ring: RingSpec
    even_images: tuple
    odd_images: tuple

    def __post_init__(self):
        object.__setattr__(self, "even_images", tuple(self.even_images))
        object.__setattr__(self, "odd_images", tuple(self.odd_images))
        if len(self.even_images) != self.ring.n_even or len(self.odd_images) != self.ring.n_odd:
            raise ValidationError("substitution needs one image per generator")
        for g in self.even_images + self.odd_images:
            self.ring.check_same(g.ring)
        odd = self.odd_images
        for i, g in enumerate(odd):
            if gmul(g, g):
                raise ValidationError(f"image of c{i + 1} does not square to zero: {g}")
            for j in range(i + 1, len(odd)):
                if gmul(g, odd[j]) + gmul(odd[j], g):
                    raise ValidationError(f"images of c{i + 1}, c{j + 1} do not anticommute")
        images = self.even_images + odd
        for i, g in enumerate(self.even_images):
            for h in images:
                if gmul(g, h) != gmul(h, g):
                    raise ValidationError(f"image of x{i + 1} is not central among the images")

    @classmethod
    def identity(cls, ring: RingSpec) -> "Substitution":
        return cls(ring, [ring.x(i + 1) for i in range(ring.n_even)],
                   [ring.c(a + 1) for a in range(ring.n_odd)])

    @classmethod
    def linear_odd(cls, ring: RingSpec, rho: Sequence[Sequence], shift: Sequence[Element] | None = None):
        """c^i -> rho^i_j c^j + b^i, even generators fixed."""
        images = []
        for i in range(ring.n_odd):
            img = ring.zero()
            for j in range(ring.n_odd):
                if rho[i][j]:
                    img = img + ring.c(j + 1).scale(rho[i][j])
            if shift is not None:
                img = img + shift[i]
            images.append(img)
        return cls(ring, [ring.x(i + 1) for i in range(ring.n_even)], images)


def substitute(s: Substitution, a: Element) -> Element:
    ring = a.ring
    ring.check_same(s.ring)
    out = ring.zero().with_flag(a.truncated)
    for m, c in a.terms.items():
        term = ring.scalar(c)
        for i, e in enumerate(m.even):
            for _ in range(e):
                term = gmul(term, s.even_images[i])
        for k in m.odd:
            term = gmul(term, s.odd_images[k])
        out = out + term
    return out


def _homogeneous_of(e: Element, key, target) -> bool:
    return all(key(m) == target for m in e.terms)


def preserves_N_grading(s: Substitution) -> bool:
    ring = s.ring
    for i, g in enumerate(s.even_images):
        if not _homogeneous_of(g, ring.degree, ring.even_weights[i]):
            return False
    for a, g in enumerate(s.odd_images):
        if not _homogeneous_of(g, ring.degree, ring.odd_weights[a]):
            return False
    return True


def preserves_Z2_grading(s: Substitution) -> bool:
    par = lambda m: m.parity
    return all(_homogeneous_of(g, par, 0) for g in s.even_images) and all(
        _homogeneous_of(g, par, 1) for g in s.odd_images
    )
