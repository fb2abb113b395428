"""Chevalley–Eilenberg cohomology of finite-dimensional Lie algebras over Q."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Sequence

from .cohomology import BettiTable, CochainComplex, betti
from .core import sort_odd
from .errors import IntegrityError, ValidationError
from .linalg import Matrix


def _vec(v, n):
    v = [Fraction(x) for x in v]
    if len(v) != n:
        raise ValidationError(f"expected a vector of length {n}")
    return tuple(v)


class LieAlgebra:
    """Basis e_0..e_{g-1} with [e_i, e_j] = Σ_k c[i][j][k] e_k."""

    def __init__(self, dim: int, brackets: dict | None = None, check: bool = True):
        self.dim = dim
        zero = (Fraction(0),) * dim
        self.c = [[zero] * dim for _ in range(dim)]
        for (i, j), v in (brackets or {}).items():
            v = _vec(v, dim)
            if i == j and any(v):
                raise ValidationError(f"[e{i + 1}, e{i + 1}] must vanish")
            self.c[i][j] = v
            self.c[j][i] = tuple(-x for x in v)
        if check:
            self.check_jacobi()

    def bracket(self, x: Sequence, y: Sequence) -> tuple:
        out = [Fraction(0)] * self.dim
        for i, xi in enumerate(x):
            if not xi:
                continue
            for j, yj in enumerate(y):
                if yj:
                    for k, ck in enumerate(self.c[i][j]):
                        if ck:
                            out[k] += xi * yj * ck
        return tuple(out)

    def basis_vector(self, i):
        return tuple(Fraction(int(k == i)) for k in range(self.dim))

    def check_jacobi(self):
        e = [self.basis_vector(i) for i in range(self.dim)]
        for i, j, k in combinations(range(self.dim), 3):
            s = [a + b + c for a, b, c in zip(
                self.bracket(e[i], self.bracket(e[j], e[k])),
                self.bracket(e[j], self.bracket(e[k], e[i])),
                self.bracket(e[k], self.bracket(e[i], e[j])))]
            if any(s):
                raise ValidationError(f"Jacobi identity fails on (e{i + 1}, e{j + 1}, e{k + 1})")

    # -- standard examples --------------------------------------------------

    @classmethod
    def abelian(cls, dim):
        return cls(dim)

    @classmethod
    def sl2(cls):
        """Basis (h, e, f): [h,e] = 2e, [h,f] = -2f, [e,f] = h."""
        return cls(3, {(0, 1): (0, 2, 0), (0, 2): (0, 0, -2), (1, 2): (1, 0, 0)})

    @classmethod
    def heisenberg(cls):
        return cls(3, {(0, 1): (0, 0, 1)})


class LieModule:
    """Representation ρ(e_i) as d x d rational matrices (acting on columns)."""

    def __init__(self, g: LieAlgebra, dim: int, action: Sequence | None = None, check: bool = True):
        self.g = g
        self.dim = dim
        if action is None:
            action = [[[0] * dim for _ in range(dim)] for _ in range(g.dim)]
        if len(action) != g.dim:
            raise ValidationError("need one action matrix per basis element")
        self.rho = [[[Fraction(x) for x in row] for row in m] for m in action]
        for m in self.rho:
            if len(m) != dim or any(len(r) != dim for r in m):
                raise ValidationError(f"action matrices must be {dim}x{dim}")
        if check:
            self.check()

    @classmethod
    def trivial(cls, g: LieAlgebra, dim: int = 1):
        return cls(g, dim)

    @classmethod
    def adjoint(cls, g: LieAlgebra):
        # rho(e_i)[k][j] = coefficient of e_k in [e_i, e_j]
        return cls(g, g.dim, [[[g.c[i][j][k] for j in range(g.dim)] for k in range(g.dim)] for i in range(g.dim)])

    def act(self, i: int, v: Sequence) -> list:
        m = self.rho[i]
        return [sum((m[r][s] * v[s] for s in range(self.dim) if v[s]), Fraction(0)) for r in range(self.dim)]

    def _mat(self, x: Sequence) -> list:
        out = [[Fraction(0)] * self.dim for _ in range(self.dim)]
        for i, xi in enumerate(x):
            if xi:
                for r in range(self.dim):
                    for s in range(self.dim):
                        out[r][s] += xi * self.rho[i][r][s]
        return out

    def check(self):
        def mm(a, b):
            return [[sum(a[r][k] * b[k][s] for k in range(self.dim)) for s in range(self.dim)]
                    for r in range(self.dim)]
        g = self.g
        for i, j in combinations(range(g.dim), 2):
            lhs = self._mat(g.c[i][j])
            ab, ba = mm(self.rho[i], self.rho[j]), mm(self.rho[j], self.rho[i])
            if any(lhs[r][s] != ab[r][s] - ba[r][s] for r in range(self.dim) for s in range(self.dim)):
                raise ValidationError(f"module axiom fails on (e{i + 1}, e{j + 1})")


def cochain_basis(g: LieAlgebra, M: LieModule, k: int) -> list:
    return [(I, mu) for I in combinations(range(g.dim), k) for mu in range(M.dim)]


def ce_delta(g: LieAlgebra, M: LieModule, k: int) -> Matrix:
    """Matrix of δ^k : C^k -> C^{k+1} on skew cochains (increasing tuples ⊗ M).

    δc(ε_0..ε_k) = Σ_i (-1)^i ε_i c(.. ^ε_i ..)
                 + Σ_{i<j} (-1)^{i+j} c([ε_i, ε_j], .. ^ε_i .. ^ε_j ..)
    """
    if not 0 <= k <= g.dim:
        raise ValidationError(f"cochain degree {k} outside [0, {g.dim}]")
    src = cochain_basis(g, M, k)
    dst = cochain_basis(g, M, k + 1)
    src_idx = {b: n for n, b in enumerate(src)}
    rows: dict = {}
    for r, (J, nu) in enumerate(dst):
        row: dict = {}
        # first sum: module action on the remaining arguments
        for i, ji in enumerate(J):
            rest = J[:i] + J[i + 1:]
            sign = -1 if i & 1 else 1
            # (ρ(e_ji) c(rest))_nu = Σ_mu ρ[nu][mu] c(rest)_mu
            for mu in range(M.dim):
                coef = M.rho[ji][nu][mu]
                if coef:
                    col = src_idx[(rest, mu)]
                    row[col] = row.get(col, 0) + sign * coef
        # second sum: bracket inserted in front
        for i, j in combinations(range(len(J)), 2):
            rest = J[:i] + J[i + 1:j] + J[j + 1:]
            sign = -1 if (i + j) & 1 else 1
            for l, cl in enumerate(g.c[J[i]][J[j]]):
                if not cl:
                    continue
                s2, tup = sort_odd((l,) + rest)
                if not s2:
                    continue
                col = src_idx[(tup, nu)]
                row[col] = row.get(col, 0) + sign * s2 * cl
        rows[r] = row
    return Matrix(len(dst), len(src), rows)


def ce_complex(g: LieAlgebra, M: LieModule) -> CochainComplex:
    dims = tuple(comb(g.dim, k) * M.dim for k in range(g.dim + 1))
    deltas = tuple(ce_delta(g, M, k) for k in range(g.dim))
    return CochainComplex(dims, deltas)


def lie_betti(g: LieAlgebra, M: LieModule) -> BettiTable:
    C = ce_complex(g, M)
    try:
        C.check()
    except IntegrityError as exc:
        raise IntegrityError(f"bad structure constants or module: {exc}") from exc
    return betti(C)
