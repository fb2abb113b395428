"""
Čech cochain complex of a finite cover with finite-dimensional presheaf data.

Cochains live on strictly increasing index tuples.  ``restrictions`` maps
(face, tuple) to the matrix of the restriction from the section space over
the face (one index removed) to the section space over the tuple.  The
result is the cohomology of this one cover; it agrees with sheaf
cohomology of the space only when the cover is good.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .cohomology import BettiTable, CochainComplex, betti
from .errors import IntegrityError, ValidationError
from .linalg import Matrix


def _show(t: tuple) -> str:
    return "(" + ",".join(str(i + 1) for i in t) + ")"


def _faces(t: tuple):
    return [(k, t[:k] + t[k + 1:]) for k in range(len(t))]


@dataclass
class CoverPresheaf:
    n_opens: int
    dims: dict  # tuple -> dimension of sections over that intersection (0 = empty)
    restrictions: dict = field(default_factory=dict)  # (face, tuple) -> dense matrix
    p_max: int | None = None

    def __post_init__(self):
        if self.n_opens < 1:
            raise ValidationError("a cover needs at least one open set")
        top = self.n_opens - 1 if self.p_max is None else self.p_max
        self.p_max = top
        dims = {}
        for p in range(top + 1):
            for t in combinations(range(self.n_opens), p + 1):
                dims[t] = int(self.dims.get(t, 0))
        for t in self.dims:
            if tuple(t) not in dims:
                raise ValidationError(f"{_show(t)} is not an increasing tuple of at most {top + 1} opens")
        self.dims = dims
        res = {}
        for t, d in dims.items():
            if len(t) == 1:
                continue
            for _, face in _faces(t):
                key = (face, t)
                dface = dims[face]
                if key in self.restrictions:
                    mat = [[Fraction(x) for x in row] for row in self.restrictions[key]]
                    if len(mat) != d or any(len(r) != dface for r in mat):
                        raise ValidationError(f"restriction {_show(face)}->{_show(t)} must be {d}x{dface}")
                elif d == 0 or dface == 0:
                    mat = [[Fraction(0)] * dface for _ in range(d)]
                elif d == dface:
                    mat = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
                else:
                    raise ValidationError(f"missing restriction {_show(face)}->{_show(t)}")
                res[key] = mat
        self.restrictions = res
        self.check_compatible()

    @classmethod
    def constant(cls, n_opens: int, nonempty, dim: int = 1):
        """Constant sheaf Q^dim with connected nonempty intersections."""
        dims = {tuple(t): dim for t in nonempty}
        for i in range(n_opens):
            dims[(i,)] = dim
        return cls(n_opens, dims)

    def _restrict(self, face, t):
        return self.restrictions[(face, t)]

    def check_compatible(self):
        """Both ways of dropping two indices give the same restriction."""
        for t, d in self.dims.items():
            if len(t) < 3 or d == 0:
                continue
            for k, l in combinations(range(len(t)), 2):
                mid_k = t[:k] + t[k + 1:]
                mid_l = t[:l] + t[l + 1:]
                bottom = t[:k] + t[k + 1:l] + t[l + 1:]
                a = _mm(self._restrict(mid_k, t), self._restrict(bottom, mid_k))
                b = _mm(self._restrict(mid_l, t), self._restrict(bottom, mid_l))
                if a != b:
                    raise IntegrityError(f"restrictions to {_show(t)} disagree through {_show(mid_k)} and {_show(mid_l)}")

    def tuples(self, p: int) -> list:
        return [t for t in self.dims if len(t) == p + 1]


def _mm(a, b):
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [[sum((a[i][k] * b[k][j] for k in range(inner)), Fraction(0)) for j in range(cols)]
            for i in range(len(a))]


def cech_complex(cp: CoverPresheaf) -> CochainComplex:
    offsets = []
    dims = []
    for p in range(cp.p_max + 1):
        off, n = {}, 0
        for t in cp.tuples(p):
            off[t] = n
            n += cp.dims[t]
        offsets.append(off)
        dims.append(n)
    deltas = []
    for p in range(cp.p_max):
        rows: dict = {}
        for t in cp.tuples(p + 1):
            if not cp.dims[t]:
                continue
            r0 = offsets[p + 1][t]
            for k, face in _faces(t):
                sign = -1 if k & 1 else 1
                mat = cp._restrict(face, t)
                c0 = offsets[p][face]
                for i, row in enumerate(mat):
                    for j, v in enumerate(row):
                        if v:
                            rr = rows.setdefault(r0 + i, {})
                            rr[c0 + j] = rr.get(c0 + j, 0) + sign * v
        deltas.append(Matrix(dims[p + 1], dims[p], rows))
    C = CochainComplex(tuple(dims), tuple(deltas))
    C.check()
    return C


def cech_betti(cp: CoverPresheaf) -> BettiTable:
    return betti(cech_complex(cp))


def is_cocycle(cp: CoverPresheaf, p: int, values: dict) -> bool:
    """Whether the p-cochain ``values`` (tuple -> vector) is killed by δ^p."""
    C = cech_complex(cp)
    vec = {}
    n = 0
    for t in cp.tuples(p):
        for i, x in enumerate(values.get(t, [0] * cp.dims[t])):
            if x:
                vec[n + i] = Fraction(x)
        n += cp.dims[t]
    d = C.delta(p)
    for i, row in d.rows.items():
        if sum((v * vec.get(j, 0) for j, v in row.items()), Fraction(0)):
            return False
    return True
