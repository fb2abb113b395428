"""
Exact linear algebra over Q.

Ranks use fraction-free elimination on integer rows (content-normalised
after each step); ``bareiss_rank`` is the classical dense Bareiss routine,
kept as an independent check.  Subspace membership works on Fractions.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence


class Matrix:
    """Sparse exact matrix: ``rows[i]`` maps column index to a nonzero Fraction."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows: dict | None = None):
        self.nrows = nrows
        self.ncols = ncols
        self.rows = {}
        for i, r in (rows or {}).items():
            r = {j: Fraction(v) for j, v in r.items() if v}
            if r:
                self.rows[i] = r

    @classmethod
    def from_dense(cls, data: Sequence[Sequence], ncols: int | None = None) -> "Matrix":
        data = [list(r) for r in data]
        nc = ncols if ncols is not None else (len(data[0]) if data else 0)
        return cls(len(data), nc, {i: {j: v for j, v in enumerate(r) if v} for i, r in enumerate(data)})

    @classmethod
    def from_columns(cls, nrows: int, columns: Sequence[dict]) -> "Matrix":
        rows: dict = {}
        for j, col in enumerate(columns):
            for i, v in col.items():
                if v:
                    rows.setdefault(i, {})[j] = v
        return cls(nrows, len(columns), rows)

    @classmethod
    def zeros(cls, nrows, ncols):
        return cls(nrows, ncols)

    def to_dense(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * self.ncols for _ in range(self.nrows)]
        for i, r in self.rows.items():
            for j, v in r.items():
                out[i][j] = v
        return out

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.nrows, self.ncols, self.rows) == (other.nrows, other.ncols, other.rows)

    def __repr__(self):
        return f"Matrix({self.nrows}x{self.ncols}, nnz={sum(map(len, self.rows.values()))})"

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.nrows}x{self.ncols} @ {other.nrows}x{other.ncols}")
        out = {}
        for i, r in self.rows.items():
            acc: dict = {}
            for k, v in r.items():
                orow = other.rows.get(k)
                if orow:
                    for j, w in orow.items():
                        acc[j] = acc.get(j, 0) + v * w
            out[i] = acc
        return Matrix(self.nrows, other.ncols, out)

    def is_zero(self) -> bool:
        return not self.rows

    def transpose(self) -> "Matrix":
        out: dict = {}
        for i, r in self.rows.items():
            for j, v in r.items():
                out.setdefault(j, {})[i] = v
        return Matrix(self.ncols, self.nrows, out)

    def rank(self) -> int:
        return rank(self.rows.values())


def _integer_row(row: dict) -> dict:
    den = 1
    for v in row.values():
        den = lcm(den, Fraction(v).denominator)
    out = {j: int(Fraction(v) * den) for j, v in row.items() if v}
    return _primitive(out)


def _primitive(row: dict) -> dict:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    if g > 1:
        row = {j: v // g for j, v in row.items()}
    return row


def rank(rows: Iterable[dict]) -> int:
    """Rank of sparse rows via fraction-free elimination over Z."""
    pivots: dict[int, dict] = {}
    order: list[int] = []
    for raw in rows:
        r = _integer_row(raw)
        if not r:
            continue
        for p in sorted(order):
            rp = r.get(p)
            if not rp:
                continue
            prow = pivots[p]
            a = prow[p]
            new = {}
            for j, v in r.items():
                new[j] = a * v
            for j, v in prow.items():
                new[j] = new.get(j, 0) - rp * v
            r = _primitive({j: v for j, v in new.items() if v})
            if not r:
                break
        if r:
            p = min(r)
            pivots[p] = r
            order.append(p)
    return len(pivots)


def bareiss_rank(dense: Sequence[Sequence]) -> int:
    """Rank by dense Bareiss elimination on a scaled integer copy."""
    m = [list(_integer_row({j: v for j, v in enumerate(r)}).get(j, 0) for j in range(len(r))) for r in dense]
    if not m:
        return 0
    nrows, ncols = len(m), len(m[0])
    prev = 1
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, nrows):
            for j in range(c + 1, ncols):
                m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) // prev
            m[i][c] = 0
        prev = m[r][c]
        r += 1
        if r == nrows:
            break
    return r


def rref(dense: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [[Fraction(v) for v in row] for row in dense]
    if not m:
        return [], []
    nrows, ncols = len(m), len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(nrows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m[:r], pivots


def nullspace(dense: Sequence[Sequence], ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of {v : M v = 0}."""
    if not dense:
        return [[Fraction(int(i == j)) for i in range(ncols or 0)] for j in range(ncols or 0)]
    n = len(dense[0])
    red, pivots = rref(dense)
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def solve(dense: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """One solution of M v = rhs, or None if inconsistent."""
    n = len(dense[0]) if dense else 0
    aug = [list(r) + [b] for r, b in zip(dense, rhs)]
    red, pivots = rref(aug)
    if n in pivots:
        return None
    v = [Fraction(0)] * n
    for row, p in zip(red, pivots):
        v[p] = row[n]
    return v


class Subspace:
    """Growing subspace of Q^dim held in echelon form (pivot = first nonzero)."""

    def __init__(self, dim: int, vectors: Iterable = ()):
        self.dim = dim
        self._rows: dict[int, dict] = {}
        for v in vectors:
            self.add(v)

    @staticmethod
    def _sparse(v) -> dict:
        if isinstance(v, dict):
            return {j: Fraction(x) for j, x in v.items() if x}
        return {j: Fraction(x) for j, x in enumerate(v) if x}

    def reduce(self, v) -> dict:
        r = self._sparse(v)
        for p in sorted(self._rows):
            a = r.get(p)
            if a:
                for j, w in self._rows[p].items():
                    nv = r.get(j, 0) - a * w
                    if nv:
                        r[j] = nv
                    else:
                        r.pop(j, None)
        return r

    def add(self, v) -> bool:
        r = self.reduce(v)
        if not r:
            return False
        p = min(r)
        inv = 1 / r[p]
        self._rows[p] = {j: x * inv for j, x in r.items()}
        return True

    def __contains__(self, v) -> bool:
        return not self.reduce(v)

    def __len__(self):
        return len(self._rows)

    def basis(self) -> list[list[Fraction]]:
        out = []
        for p in sorted(self._rows):
            v = [Fraction(0)] * self.dim
            for j, x in self._rows[p].items():
                v[j] = x
            out.append(v)
        return out

    def copy(self) -> "Subspace":
        s = Subspace(self.dim)
        s._rows = {p: dict(r) for p, r in self._rows.items()}
        return s

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(v in self for v in other.basis())
