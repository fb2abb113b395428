"""
Universal differential calculus and differential-operator filtrations over
a finite-dimensional unital Q-algebra.

Algebra elements are coordinate tuples over a fixed basis.  Operators in
hom(P, Q) are dense dim(Q) x dim(P) matrices, flattened row-major when
treated as vectors.  Ω^k(A) sits inside A^{⊗(k+1)}, stored as a map from
index tuples to coefficients.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product
from typing import Sequence

from .errors import ValidationError
from .linalg import Subspace, nullspace


def _z(n):
    return [Fraction(0)] * n


def _matmul(a, b):
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    return [[sum((a[i][t] * b[t][j] for t in range(k) if a[i][t]), Fraction(0)) for j in range(m)]
            for i in range(n)]


def _matsub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _flat(m) -> list:
    return [x for row in m for x in row]


def _unflat(v, rows, cols) -> list:
    return [[Fraction(v[r * cols + c]) for c in range(cols)] for r in range(rows)]


def _identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


class FDAlgebra:
    """Unital associative algebra given by structure constants.

    ``table[i][j]`` is the coordinate vector of e_i e_j.
    """

    def __init__(self, dim: int, table, unit: Sequence, name: str = "", check: bool = True):
        self.dim = dim
        self.table = [[tuple(Fraction(x) for x in table[i][j]) for j in range(dim)] for i in range(dim)]
        self.unit = tuple(Fraction(x) for x in unit)
        self.name = name
        if check:
            self.check()

    def basis(self, i):
        return tuple(Fraction(int(k == i)) for k in range(self.dim))

    def mul(self, a, b) -> tuple:
        out = _z(self.dim)
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                if bj:
                    for k, c in enumerate(self.table[i][j]):
                        if c:
                            out[k] += ai * bj * c
        return tuple(out)

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple(x - y for x, y in zip(a, b))

    def scale(self, q, a):
        return tuple(Fraction(q) * x for x in a)

    def check(self):
        e = [self.basis(i) for i in range(self.dim)]
        for i, j, k in product(range(self.dim), repeat=3):
            if self.mul(self.mul(e[i], e[j]), e[k]) != self.mul(e[i], self.mul(e[j], e[k])):
                raise ValidationError(f"product is not associative on (e{i}, e{j}, e{k})")
        for i in range(self.dim):
            if self.mul(self.unit, e[i]) != e[i] or self.mul(e[i], self.unit) != e[i]:
                raise ValidationError("unit law fails")

    def is_commutative(self) -> bool:
        return all(self.table[i][j] == self.table[j][i] for i, j in combinations(range(self.dim), 2))

    def is_central(self, a) -> bool:
        return all(self.mul(a, self.basis(i)) == self.mul(self.basis(i), a) for i in range(self.dim))

    def left_matrix(self, a) -> list:
        """Matrix of p -> a p."""
        cols = [self.mul(a, self.basis(j)) for j in range(self.dim)]
        return [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)]

    def right_matrix(self, a) -> list:
        """Matrix of p -> p a."""
        cols = [self.mul(self.basis(j), a) for j in range(self.dim)]
        return [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)]

    # -- standard algebras --------------------------------------------------

    @classmethod
    def scalars(cls):
        return cls(1, [[(1,)]], (1,), "Q")

    @classmethod
    def dual_numbers(cls):
        """Q[ε]/ε², basis (1, ε)."""
        return cls(2, [[(1, 0), (0, 1)], [(0, 1), (0, 0)]], (1, 0), "Q[eps]/eps^2")

    @classmethod
    def matrix_algebra(cls, n: int = 2):
        """n x n matrices, basis E_ij ordered row-major."""
        dim = n * n
        table = [[None] * dim for _ in range(dim)]
        for a, b in product(range(dim), repeat=2):
            i, j = divmod(a, n)
            k, l = divmod(b, n)
            v = [0] * dim
            if j == k:
                v[i * n + l] = 1
            table[a][b] = tuple(v)
        unit = [0] * dim
        for i in range(n):
            unit[i * n + i] = 1
        return cls(dim, table, tuple(unit), f"M{n}(Q)")

    @classmethod
    def grassmann(cls, m: int):
        """Λ(c1..cm) as an ordinary (non-commutative) algebra, basis = subsets."""
        subsets = [s for k in range(m + 1) for s in combinations(range(m), k)]
        index = {s: i for i, s in enumerate(subsets)}
        from .core import merge_odd

        dim = len(subsets)
        table = [[None] * dim for _ in range(dim)]
        for s, t in product(subsets, repeat=2):
            v = [0] * dim
            sign, st = merge_odd(s, t)
            if sign:
                v[index[st]] = sign
            table[index[s]][index[t]] = tuple(v)
        unit = [0] * dim
        unit[index[()]] = 1
        return cls(dim, table, tuple(unit), f"Lambda({m})")

    def opposite(self) -> "FDAlgebra":
        table = [[self.table[j][i] for j in range(self.dim)] for i in range(self.dim)]
        return FDAlgebra(self.dim, table, self.unit, self.name + "^op", check=False)

    def derivations(self) -> list[list]:
        """Basis of Der(A) as dim x dim matrices."""
        n = self.dim
        e = [self.basis(i) for i in range(n)]
        rows = []
        # unknown D[r][s] at index r*n + s; D e_s = Σ_r D[r][s] e_r
        for i, j in product(range(n), repeat=2):
            prod_ij = self.mul(e[i], e[j])
            for k in range(n):
                row = _z(n * n)
                for r in range(n):
                    if prod_ij[r]:
                        row[k * n + r] += prod_ij[r]
                    # -(D e_i) e_j
                    c = self.mul(e[r], e[j])[k]
                    if c:
                        row[r * n + i] -= c
                    # -e_i (D e_j)
                    c = self.mul(e[i], e[r])[k]
                    if c:
                        row[r * n + j] -= c
                rows.append(row)
        return [_unflat(v, n, n) for v in nullspace(rows, n * n)]

    def inner_derivation(self, b) -> list:
        """ad_b(p) = b p - p b."""
        return _matsub(self.left_matrix(b), self.right_matrix(b))


class Bimod:
    """Bimodule given by left and right action matrices of the basis."""

    def __init__(self, A: FDAlgebra, dim: int, left, right, check: bool = True):
        self.A = A
        self.dim = dim
        self.left = [[[Fraction(x) for x in r] for r in m] for m in left]
        self.right = [[[Fraction(x) for x in r] for r in m] for m in right]
        if check:
            self.check()

    @classmethod
    def regular(cls, A: FDAlgebra):
        return cls(A, A.dim, [A.left_matrix(A.basis(i)) for i in range(A.dim)],
                   [A.right_matrix(A.basis(i)) for i in range(A.dim)])

    def opposite(self, Aop: FDAlgebra) -> "Bimod":
        """The same space as an Aop-bimodule, sides swapped."""
        return Bimod(Aop, self.dim, self.right, self.left, check=False)

    def _comb(self, mats, a):
        out = [[Fraction(0)] * self.dim for _ in range(self.dim)]
        for i, ai in enumerate(a):
            if ai:
                for r in range(self.dim):
                    for s in range(self.dim):
                        out[r][s] += ai * mats[i][r][s]
        return out

    def L(self, a):
        return self._comb(self.left, a)

    def R(self, a):
        return self._comb(self.right, a)

    def check(self):
        A = self.A
        ident = _identity(self.dim)
        if self.L(A.unit) != ident or self.R(A.unit) != ident:
            raise ValidationError("bimodule actions are not unital")
        e = [A.basis(i) for i in range(A.dim)]
        for i, j in product(range(A.dim), repeat=2):
            if _matmul(self.left[i], self.right[j]) != _matmul(self.right[j], self.left[i]):
                raise ValidationError("left and right actions do not commute")
            if self.L(A.mul(e[i], e[j])) != _matmul(self.left[i], self.left[j]):
                raise ValidationError("left action is not associative")
            if self.R(A.mul(e[i], e[j])) != _matmul(self.right[j], self.right[i]):
                raise ValidationError("right action is not associative")


# -- universal calculus ---------------------------------------------------------


def tensor(A: FDAlgebra, *factors) -> dict:
    """Pure tensor a0 ⊗ ... ⊗ ak."""
    out = {(): Fraction(1)}
    for f in factors:
        nxt = {}
        for key, c in out.items():
            for i, x in enumerate(f):
                if x:
                    nxt[key + (i,)] = nxt.get(key + (i,), 0) + c * x
        out = nxt
    return {k: v for k, v in out.items() if v}


def _tadd(t1, t2, s=1):
    out = dict(t1)
    for k, v in t2.items():
        out[k] = out.get(k, 0) + s * v
    return {k: v for k, v in out.items() if v}


def juxtapose(A: FDAlgebra, t1: dict, t2: dict) -> dict:
    """(a0⊗..⊗ak)(b0⊗..⊗bl) = a0⊗..⊗(ak b0)⊗..⊗bl."""
    out: dict = {}
    for k1, c1 in t1.items():
        for k2, c2 in t2.items():
            mid = A.table[k1[-1]][k2[0]]
            for m, cm in enumerate(mid):
                if cm:
                    key = k1[:-1] + (m,) + k2[1:]
                    out[key] = out.get(key, 0) + c1 * c2 * cm
    return {k: v for k, v in out.items() if v}


def tensor_d(A: FDAlgebra, t: dict) -> dict:
    """Universal d on A^{⊗(k+1)}: alternating insertion of the unit."""
    out: dict = {}
    unit = [i for i, x in enumerate(A.unit) if x]
    for key, c in t.items():
        for pos in range(len(key) + 1):
            s = -1 if pos & 1 else 1
            for u in unit:
                nk = key[:pos] + (u,) + key[pos:]
                out[nk] = out.get(nk, 0) + s * c * A.unit[u]
    return {k: v for k, v in out.items() if v}


def d1(A: FDAlgebra, a) -> dict:
    """da = 1⊗a - a⊗1."""
    return _tadd(tensor(A, A.unit, a), tensor(A, a, A.unit), -1)


def omega_monomial(A: FDAlgebra, factors: Sequence) -> dict:
    """a0 da1 ... dak as an element of A^{⊗(k+1)}."""
    out = tensor(A, factors[0])
    for a in factors[1:]:
        out = juxtapose(A, out, d1(A, a))
    return out


def universal_d(A: FDAlgebra, factors: Sequence) -> dict:
    """d(a0 da1 ... dak) = da0 da1 ... dak."""
    out = d1(A, factors[0])
    for a in factors[1:]:
        out = juxtapose(A, out, d1(A, a))
    return out


def universal_omega1(A: FDAlgebra) -> list[list[Fraction]]:
    """Basis of the sub-bimodule of A⊗A generated by {1⊗a - a⊗1}."""
    n = A.dim
    span = Subspace(n * n)
    e = [A.basis(i) for i in range(n)]
    for i, k, j in product(range(n), repeat=3):
        t = juxtapose(A, juxtapose(A, tensor(A, e[i]), d1(A, e[k])), tensor(A, e[j]))
        span.add({a * n + b: v for (a, b), v in t.items()})
    return span.basis()


def multiplication_kernel_dim(A: FDAlgebra) -> int:
    n = A.dim
    rows = [[A.table[a][b][k] for a in range(n) for b in range(n)] for k in range(n)]
    return len(nullspace(rows, n * n))


def check_w265(A: FDAlgebra) -> bool:
    """(da) b = d(ab) - a db on all basis pairs."""
    e = [A.basis(i) for i in range(A.dim)]
    for a, b in product(e, repeat=2):
        lhs = juxtapose(A, d1(A, a), tensor(A, b))
        rhs = _tadd(d1(A, A.mul(a, b)), juxtapose(A, tensor(A, a), d1(A, b)), -1)
        if lhs != rhs:
            return False
    return True


# -- operator filtrations --------------------------------------------------------


class HomSpace:
    """hom_Q(P, Q) with the left and right A-A• structures."""

    def __init__(self, P: Bimod, Q: Bimod):
        if P.A is not Q.A:
            raise ValidationError("P and Q must be bimodules over the same algebra")
        self.A, self.P, self.Q = P.A, P, Q
        self.rows, self.cols = Q.dim, P.dim
        self.dim = Q.dim * P.dim

    def vec(self, phi) -> list:
        return _flat(phi)

    def mat(self, v) -> list:
        return _unflat(v, self.rows, self.cols)

    def a_left(self, a, phi):      # (aΦ)(p) = a Φ(p)
        return _matmul(self.Q.L(a), phi)

    def a_bullet(self, phi, a):    # (Φ•a)(p) = Φ(a p)
        return _matmul(phi, self.P.L(a))

    def a_right(self, phi, a):     # (Φa)(p) = Φ(p) a
        return _matmul(self.Q.R(a), phi)

    def bullet_a(self, a, phi):    # (a•Φ)(p) = Φ(p a)
        return _matmul(phi, self.P.R(a))

    def delta(self, a, phi):
        return _matsub(self.a_left(a, phi), self.a_bullet(phi, a))

    def delta_bar(self, a, phi):
        return _matsub(self.a_right(phi, a), self.bullet_a(a, phi))

    def _linear_map(self, fn) -> list:
        """Matrix (dim x dim) of a linear map on flattened operators."""
        cols = []
        for k in range(self.dim):
            v = _z(self.dim)
            v[k] = Fraction(1)
            cols.append(self.vec(fn(self.mat(v))))
        return [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)]

    def _annihilator(self, sub: Subspace) -> list:
        """Rows w with w·b = 0 for every b in sub."""
        basis = sub.basis()
        if not basis:
            return [[Fraction(int(i == j)) for j in range(self.dim)] for i in range(self.dim)]
        return nullspace(basis, self.dim)

    def preimage(self, maps, target: Subspace) -> Subspace:
        """{Φ : f(Φ) ∈ target for every f in maps}."""
        ann = self._annihilator(target)
        rows = []
        for f in maps:
            M = self._linear_map(f)
            for w in ann:
                rows.append([sum((w[i] * M[i][j] for i in range(self.dim) if w[i]), Fraction(0))
                             for j in range(self.dim)])
        rows = [r for r in rows if any(r)]
        if not rows:
            return Subspace(self.dim, [[Fraction(int(i == j)) for j in range(self.dim)] for i in range(self.dim)])
        return Subspace(self.dim, nullspace(rows, self.dim))

    def generated(self, sub: Subspace, left: bool = True, bullet: bool = True) -> Subspace:
        """Span of a Φ • b over Φ in sub and basis a, b (either side optional)."""
        A = self.A
        e = [A.basis(i) for i in range(A.dim)]
        lefts = e if left else [A.unit]
        rights = e if bullet else [A.unit]
        out = Subspace(self.dim)
        for v in sub.basis():
            phi = self.mat(v)
            for a in lefts:
                la = self.a_left(a, phi)
                for b in rights:
                    out.add(self.vec(self.a_bullet(la, b)))
        return out

    def right_generated(self, sub: Subspace) -> Subspace:
        """Span of Φ b (right A-structure) over Φ in sub."""
        out = Subspace(self.dim)
        for v in sub.basis():
            phi = self.mat(v)
            for i in range(self.A.dim):
                out.add(self.vec(self.a_right(phi, self.A.basis(i))))
        return out

    def left_span(self, sub: Subspace) -> Subspace:
        """Span of b Φ (left A-structure) over Φ in sub."""
        out = Subspace(self.dim)
        for v in sub.basis():
            phi = self.mat(v)
            for i in range(self.A.dim):
                out.add(self.vec(self.a_left(self.A.basis(i), phi)))
        return out


def _sum(s1: Subspace, s2: Subspace) -> Subspace:
    out = s1.copy()
    for v in s2.basis():
        out.add(v)
    return out


def _intersect(s1: Subspace, s2: Subspace, dim: int) -> Subspace:
    b1, b2 = s1.basis(), s2.basis()
    if not b1 or not b2:
        return Subspace(dim)
    # solve Σ x_i b1_i - Σ y_j b2_j = 0
    rows = [[b1[i][k] for i in range(len(b1))] + [-b2[j][k] for j in range(len(b2))] for k in range(dim)]
    out = Subspace(dim)
    for sol in nullspace(rows, len(b1) + len(b2)):
        out.add([sum((sol[i] * b1[i][k] for i in range(len(b1))), Fraction(0)) for k in range(dim)])
    return out


class Filtration:
    """Nested subspaces of hom(P, Q) with the centres used to build them."""

    def __init__(self, hom: HomSpace, levels: list[Subspace], centres: list[Subspace]):
        self.hom = hom
        self.levels = levels
        self.centres = centres

    def dims(self) -> list[int]:
        return [len(s) for s in self.levels]

    def contains(self, r: int, phi) -> bool:
        return self.hom.vec(phi) in self.levels[r]

    def order(self, phi) -> int | None:
        v = self.hom.vec(phi)
        for r, s in enumerate(self.levels):
            if v in s:
                return r
        return None


def left_order_filtration(A: FDAlgebra, P: Bimod, Q: Bimod, r_max: int = 3) -> Filtration:
    """I_0 ⊆ I_1 ⊆ ... : I_r / I_{r-1} is the A-A• module generated by the
    centre of hom(P,Q)/I_{r-1} under the delta maps."""
    hom = HomSpace(P, Q)
    e = [A.basis(i) for i in range(A.dim)]
    prev = Subspace(hom.dim)
    levels, centres = [], []
    for _ in range(r_max + 1):
        centre = hom.preimage([lambda phi, a=a: hom.delta(a, phi) for a in e], prev)
        level = _sum(hom.generated(centre), prev)
        centres.append(centre)
        levels.append(level)
        prev = level
    return Filtration(hom, levels, centres)


def right_order_filtration(A: FDAlgebra, P: Bimod, Q: Bimod, r_max: int = 3,
                           mirror: bool = False) -> Filtration:
    """Right operators: R_r = span{Φ b : δ̄_a Φ ∈ R_{r-1} for all a} + R_{r-1}.

    With ``mirror`` the left construction is run over the opposite algebra
    instead, which also closes each level under a•Φ.
    """
    if mirror:
        Aop = A.opposite()
        F = left_order_filtration(Aop, P.opposite(Aop), Q.opposite(Aop), r_max)
        return Filtration(HomSpace(P, Q), F.levels, F.centres)
    hom = HomSpace(P, Q)
    e = [A.basis(i) for i in range(A.dim)]
    prev = Subspace(hom.dim)
    levels, centres = [], []
    for _ in range(r_max + 1):
        centre = hom.preimage([lambda phi, a=a: hom.delta_bar(a, phi) for a in e], prev)
        level = _sum(hom.right_generated(centre), prev)
        centres.append(centre)
        levels.append(level)
        prev = level
    return Filtration(hom, levels, centres)


def two_sided_filtration(A: FDAlgebra, P: Bimod, Q: Bimod, r_max: int = 2) -> Filtration:
    """Two-sided operators; order 0 is the linear span of left and right
    zero-order operators."""
    hom = HomSpace(P, Q)
    e = [A.basis(i) for i in range(A.dim)]
    zero = Subspace(hom.dim)
    dl = [lambda phi, a=a: hom.delta(a, phi) for a in e]
    dr = [lambda phi, a=a: hom.delta_bar(a, phi) for a in e]
    left0 = hom.left_span(hom.preimage(dl, zero))
    right0 = hom.right_generated(hom.preimage(dr, zero))
    prev = _sum(left0, right0)
    levels, centres = [prev], [prev]
    for _ in range(r_max):
        left = _sum(hom.left_span(hom.preimage(dl, prev)), prev)
        right = _sum(hom.right_generated(hom.preimage(dr, prev)), prev)
        prev = _intersect(left, right, hom.dim)
        levels.append(prev)
        centres.append(prev)
    return Filtration(hom, levels, centres)


def two_sided_first_order(op, A: FDAlgebra, P: Bimod, Q: Bimod) -> bool:
    """a Δ(p) b - a Δ(p b) - Δ(a p) b + Δ(a p b) = 0, i.e. δ_a δ̄_b Δ = 0."""
    hom = HomSpace(P, Q)
    e = [A.basis(i) for i in range(A.dim)]
    for a, b in product(e, repeat=2):
        if any(x for row in hom.delta(a, hom.delta_bar(b, op)) for x in row):
            return False
    return True


def is_left_zero_order(op, A: FDAlgebra, P: Bimod, Q: Bimod) -> bool:
    """δ_a Δ = 0 for all a: Δ is a left A-module homomorphism."""
    hom = HomSpace(P, Q)
    return all(not any(x for row in hom.delta(A.basis(i), op) for x in row) for i in range(A.dim))


def commutative_order(op, A: FDAlgebra, P: Bimod, Q: Bimod, s_max: int = 4) -> int | None:
    """Order by delta chains over basis multisets (A commutative)."""
    if not A.is_commutative():
        raise ValidationError("commutative_order needs a commutative algebra")
    hom = HomSpace(P, Q)
    e = [A.basis(i) for i in range(A.dim)]
    for s in range(s_max + 1):
        ok = True
        for chain in combinations_with_replacement(range(A.dim), s + 1):
            phi = op
            for i in chain:
                phi = hom.delta(e[i], phi)
            if any(x for row in phi for x in row):
                ok = False
                break
        if ok:
            return s
    return None


def compose(*ops):
    out = ops[0]
    for op in ops[1:]:
        out = _matmul(out, op)
    return out
