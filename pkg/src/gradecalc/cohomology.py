"""
Finite cochain complexes, exact Betti numbers and the weight-graded de Rham
complex of the model ring.

The auxiliary weight gives x, dx the even weight and c, dc the odd weight.
d preserves it, so each weight block is a finite complex and the de Rham
cohomology is the sum of the block cohomologies.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import combinations, combinations_with_replacement

from .core import RingSpec
from .errors import IntegrityError, ValidationError
from .forms import Form, FormMonomial, exterior_d
from .linalg import Matrix, solve


@dataclass(frozen=True)
class CochainComplex:
    dims: tuple
    deltas: tuple  # deltas[p] : C^p -> C^{p+1}, shape dims[p+1] x dims[p]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(self.dims))
        object.__setattr__(self, "deltas", tuple(self.deltas))
        if len(self.deltas) > max(len(self.dims) - 1, 0):
            raise ValidationError("more coboundaries than cochain spaces allow")
        for p, dp in enumerate(self.deltas):
            if (dp.nrows, dp.ncols) != (self.dims[p + 1], self.dims[p]):
                raise ValidationError(
                    f"delta^{p} has shape {dp.nrows}x{dp.ncols}, expected {self.dims[p + 1]}x{self.dims[p]}")

    def delta(self, p: int) -> Matrix:
        if 0 <= p < len(self.deltas):
            return self.deltas[p]
        rows = self.dims[p + 1] if 0 <= p + 1 < len(self.dims) else 0
        cols = self.dims[p] if 0 <= p < len(self.dims) else 0
        return Matrix.zeros(rows, cols)

    def check(self):
        """Raise IntegrityError unless delta^{p+1} delta^p = 0 for all p."""
        for p in range(len(self.deltas) - 1):
            if not (self.deltas[p + 1] @ self.deltas[p]).is_zero():
                raise IntegrityError(f"delta^{p + 1} delta^{p} != 0")

    def euler_characteristic(self) -> int:
        return sum((-1) ** p * d for p, d in enumerate(self.dims))


@dataclass(frozen=True)
class BettiTable:
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))

    def __getitem__(self, p):
        return self.values[p] if 0 <= p < len(self.values) else 0

    def __len__(self):
        return len(self.values)

    def __add__(self, other: "BettiTable") -> "BettiTable":
        n = max(len(self), len(other))
        return BettiTable(tuple(self[p] + other[p] for p in range(n)))

    def trimmed(self) -> "BettiTable":
        v = list(self.values)
        while len(v) > 1 and v[-1] == 0:
            v.pop()
        return BettiTable(tuple(v))

    def euler_characteristic(self) -> int:
        return sum((-1) ** p * h for p, h in enumerate(self.values))

    def to_json(self) -> dict:
        return {str(p): h for p, h in enumerate(self.values)}


def betti(C: CochainComplex) -> BettiTable:
    C.check()
    ranks = [C.delta(p).rank() for p in range(len(C.dims))]
    out = []
    for p, d in enumerate(C.dims):
        h = d - ranks[p] - (ranks[p - 1] if p else 0)
        if h < 0:
            raise IntegrityError(f"negative cohomology dimension in degree {p}")
        out.append(h)
    return BettiTable(tuple(out))


# -- de Rham complex of the model ring ----------------------------------------


def _form_monomials_of_weight(ring: RingSpec, w: int):
    """(form monomial, its weight) for dx subsets and dc multisets of weight <= w."""
    out = []
    for k in range(ring.n_even + 1):
        for dx in combinations(range(ring.n_even), k):
            wx = sum(ring.even_weights[i] for i in dx)
            if wx > w:
                continue
            for r in range(0, w - wx + 1):
                if ring.n_odd == 0 and r:
                    break
                for dc in combinations_with_replacement(range(ring.n_odd), r):
                    wf = wx + sum(ring.odd_weights[a] for a in dc)
                    if wf <= w:
                        out.append((FormMonomial(dx, dc), wf))
    return out


def weight_basis(ring: RingSpec, w: int) -> dict[int, list]:
    """Basis keys (monomial, form monomial) of total weight ``w`` by form degree."""
    by_deg: dict[int, list] = {}
    for f, wf in _form_monomials_of_weight(ring, w):
        for m in ring.monomials_of_weight(w - wf):
            by_deg.setdefault(f.degree, []).append((m, f))
    return {p: sorted(v, key=lambda k: (k[1], k[0])) for p, v in sorted(by_deg.items())}


def _untruncated(ring: RingSpec, w: int) -> RingSpec:
    need = w // min(ring.even_weights, default=1) if ring.n_even else 0
    return ring if ring.trunc >= need else replace(ring, trunc=need)


def weight_complex(ring: RingSpec, w: int, cap: int | None = None) -> CochainComplex:
    """Block of the de Rham complex spanned by forms of total weight ``w``."""
    if w < 0 or (cap is not None and w > cap):
        raise ValidationError(f"weight {w} outside [0, {cap}]")
    ring = _untruncated(ring, w)
    basis = weight_basis(ring, w)
    top = max(basis, default=0)
    spaces = [basis.get(p, []) for p in range(top + 1)]
    index = [{k: i for i, k in enumerate(sp)} for sp in spaces]
    deltas = []
    for p in range(top):
        cols = []
        for key in spaces[p]:
            dphi = exterior_d(Form(ring, {key: Fraction(1)}))
            if dphi.truncated:
                raise IntegrityError("exterior derivative overflowed inside a weight block")
            cols.append({index[p + 1][k]: c for k, c in dphi.terms.items()})
        deltas.append(Matrix.from_columns(len(spaces[p + 1]), cols))
    return CochainComplex(tuple(len(s) for s in spaces), tuple(deltas))


def de_rham_betti(ring: RingSpec, max_weight: int) -> tuple[BettiTable, dict[int, BettiTable]]:
    """Summed Betti table over weights 0..max_weight, plus the per-weight tables."""
    per = {}
    total = BettiTable((0,))
    for w in range(max_weight + 1):
        C = weight_complex(ring, w)
        if C.euler_characteristic() != (b := betti(C)).euler_characteristic():
            raise IntegrityError(f"Euler characteristic mismatch in weight {w}")
        per[w] = b
        total = total + b
    return total, per


# -- circle witness -------------------------------------------------------------


def laurent_h1_witness(window: int, candidate: dict[int, Fraction] | None = None) -> tuple[bool, bool]:
    """Closedness / exactness certificate for f(t) dt on the circle model.

    ``candidate`` maps exponents k to the coefficient of t^k dt; the default
    is dt/t.  Exactness means some sum of t^k, |k| <= window, has d equal to
    the candidate.  The exponent bound only restricts primitives; no Betti
    numbers are derived from a window.
    """
    if window < 1:
        raise ValidationError("window must be at least 1")
    candidate = {-1: Fraction(1)} if candidate is None else {k: Fraction(v) for k, v in candidate.items() if v}
    # d(f dt) = f'(t) dt∧dt, and dt∧dt = 0 since dt has odd form degree
    closed = True
    exps = list(range(-window, window + 1))
    targets = sorted(set(k - 1 for k in exps if k) | set(candidate))
    row_of = {e: i for i, e in enumerate(targets)}
    dense = [[Fraction(0)] * len(exps) for _ in targets]
    for j, k in enumerate(exps):
        if k:
            dense[row_of[k - 1]][j] = Fraction(k)
    rhs = [candidate.get(e, Fraction(0)) for e in targets]
    exact = solve(dense, rhs) is not None
    return closed, exact


def laurent_primitive(window: int, candidate: dict[int, Fraction]) -> dict[int, Fraction] | None:
    """A primitive sum c_k t^k of the candidate within the window, or None."""
    exps = [k for k in range(-window, window + 1) if k]
    targets = sorted(set(k - 1 for k in exps) | set(candidate))
    dense = [[Fraction(k) if k - 1 == e else Fraction(0) for k in exps] for e in targets]
    sol = solve(dense, [Fraction(candidate.get(e, 0)) for e in targets])
    if sol is None:
        return None
    return {k: v for k, v in zip(exps, sol) if v}
