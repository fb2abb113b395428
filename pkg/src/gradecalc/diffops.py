"""
Linear operators on the truncated ring (and free modules A^r over it),
delta maps, and differential-operator order.

An operator is stored by its images of the truncated monomial basis.  An
image computed through an overflowing product carries the truncation flag;
such columns are "uncertified" and every zero test ignores them.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations, product
from typing import Callable

from .core import Element, RingSpec, gmul, z2_grade, _q
from .derivations import GradedDerivation, apply as apply_derivation, check_leibniz
from .errors import ContractError, IntegrityError, StructureError
from .linalg import Matrix


@lru_cache(maxsize=None)
def module_basis(ring: RingSpec, rank: int) -> tuple:
    mons = ring.basis()
    return tuple((k, m) for k in range(rank) for m in mons)


@lru_cache(maxsize=None)
def _basis_index(ring: RingSpec, rank: int) -> dict:
    return {b: i for i, b in enumerate(module_basis(ring, rank))}


def _vec_flag(vec) -> bool:
    return any(e.truncated for e in vec)


class LinearOperator:
    """Q-linear map A^r -> A^r on the truncated basis.

    ``columns[i]`` is the image (a tuple of r Elements) of basis vector i of
    ``module_basis(ring, rank)``.  ``parity`` is an optional Z2 tag.
    """

    __slots__ = ("ring", "rank", "columns", "parity", "label")

    def __init__(self, ring: RingSpec, columns, rank: int = 1, parity: int | None = None, label: str = ""):
        self.ring = ring
        self.rank = rank
        self.columns = tuple(tuple(c) for c in columns)
        if len(self.columns) != len(module_basis(ring, rank)):
            raise StructureError("operator needs one image per basis vector")
        self.parity = parity
        self.label = label

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_function(cls, ring, fn: Callable, rank: int = 1, parity=None, label=""):
        """Evaluate ``fn`` on every basis vector.  For rank 1, ``fn`` takes
        and returns Elements; otherwise tuples of Elements."""
        cols = []
        for k, m in module_basis(ring, rank):
            e = Element.from_monomial(ring, m)
            if rank == 1:
                out = fn(e)
                cols.append((out,))
            else:
                vec = tuple(e if j == k else ring.zero() for j in range(rank))
                cols.append(tuple(fn(vec)))
        return cls(ring, cols, rank, parity, label)

    @classmethod
    def identity(cls, ring, rank=1):
        return cls.from_function(ring, lambda v: v, rank, 0, "id")

    @classmethod
    def zero(cls, ring, rank=1):
        z = ring.zero()
        return cls(ring, [(z,) * rank] * len(module_basis(ring, rank)), rank, 0, "0")

    @classmethod
    def multiplication(cls, a: Element, rank=1):
        ring = a.ring
        if rank == 1:
            fn = lambda f: gmul(a, f)
        else:
            fn = lambda v: tuple(gmul(a, e) for e in v)
        return cls.from_function(ring, fn, rank, a.parity(), f"mul({a})")

    @classmethod
    def derivation(cls, u: GradedDerivation, rank=1):
        ring = u.ring
        if rank == 1:
            fn = lambda f: apply_derivation(u, f)
        else:
            fn = lambda v: tuple(apply_derivation(u, e) for e in v)
        return cls.from_function(ring, fn, rank, u.parity(), str(u))

    @classmethod
    def projection(cls, ring, degree: int, rank=1):
        """Projection onto the N-degree ``degree`` component."""
        def proj(e):
            return Element(ring, {m: c for m, c in e.terms.items() if ring.degree(m) == degree}, e.truncated)
        fn = proj if rank == 1 else (lambda v: tuple(proj(e) for e in v))
        return cls.from_function(ring, fn, rank, 0, f"proj({degree})")

    @classmethod
    def matrix_action(cls, ring, mat, rank):
        """Left multiplication of A^r by an r x r matrix of Elements."""
        def fn(v):
            return tuple(sum((gmul(mat[i][j], v[j]) for j in range(rank)), ring.zero()) for i in range(rank))
        return cls.from_function(ring, fn, rank, None, "matrix")

    # -- evaluation ---------------------------------------------------------

    def _apply_vec(self, vec) -> tuple:
        ring = self.ring
        idx = _basis_index(ring, self.rank)
        flag = _vec_flag(vec)
        acc = [dict() for _ in range(self.rank)]
        for k, e in enumerate(vec):
            for m, c in e.terms.items():
                col = self.columns[idx[(k, m)]]
                for j, img in enumerate(col):
                    if img.truncated:
                        flag = True
                    t = acc[j]
                    for mm, cc in img.terms.items():
                        t[mm] = t.get(mm, 0) + c * cc
        return tuple(Element(ring, t, flag) for t in acc)

    def apply(self, v):
        if isinstance(v, Element):
            if self.rank != 1:
                raise StructureError("scalar input to a module operator")
            return self._apply_vec((v,))[0]
        return self._apply_vec(tuple(v))

    __call__ = apply

    def _with(self, columns, parity=None, label=""):
        return LinearOperator(self.ring, columns, self.rank, parity, label)

    def __matmul__(self, other: "LinearOperator") -> "LinearOperator":
        self._check(other)
        par = None if None in (self.parity, other.parity) else (self.parity + other.parity) % 2
        return self._with([self._apply_vec(c) for c in other.columns], par, f"{self.label}∘{other.label}")

    compose = __matmul__

    def _check(self, other):
        self.ring.check_same(other.ring)
        if self.rank != other.rank:
            raise StructureError("rank mismatch")

    def __add__(self, other):
        self._check(other)
        par = self.parity if self.parity == other.parity else None
        cols = [tuple(a + b for a, b in zip(c1, c2)) for c1, c2 in zip(self.columns, other.columns)]
        return self._with(cols, par, f"{self.label}+{other.label}")

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, q):
        q = _q(q)
        return self._with([tuple(e.scale(q) for e in c) for c in self.columns], self.parity, self.label)

    def left_mul(self, a: Element) -> "LinearOperator":
        """(aΦ)(p) = a Φ(p)."""
        par = None if self.parity is None or a.parity() is None else (self.parity + a.parity()) % 2
        return self._with([tuple(gmul(a, e) for e in c) for c in self.columns], par)

    def right_mul(self, a: Element) -> "LinearOperator":
        """(Φ•a)(p) = Φ(a p)."""
        par = None if self.parity is None or a.parity() is None else (self.parity + a.parity()) % 2
        cols = []
        for k, m in module_basis(self.ring, self.rank):
            e = gmul(a, Element.from_monomial(self.ring, m))
            vec = tuple(e if j == k else self.ring.zero() for j in range(self.rank))
            cols.append(self._apply_vec(vec))
        return self._with(cols, par)

    # -- inspection ---------------------------------------------------------

    def certified(self) -> list[bool]:
        return [not _vec_flag(c) for c in self.columns]

    def is_zero(self) -> bool:
        return all(not any(c) for c in self.columns if not _vec_flag(c))

    def agrees(self, other: "LinearOperator") -> bool:
        return (self - other).is_zero()

    def n_certified(self) -> int:
        return sum(self.certified())

    def matrix(self) -> Matrix:
        """Exact matrix on the basis; uncertified columns are left empty."""
        idx = _basis_index(self.ring, self.rank)
        cols = []
        for c in self.columns:
            if _vec_flag(c):
                cols.append({})
                continue
            cols.append({idx[(j, m)]: v for j, e in enumerate(c) for m, v in e.terms.items()})
        return Matrix.from_columns(len(idx), cols)

    def _signature(self):
        return tuple(
            None if _vec_flag(c) else tuple(frozenset(e.terms.items()) for e in c) for c in self.columns
        )

    def parity_parts(self) -> dict[int, "LinearOperator"]:
        """Split into parity-preserving (0) and parity-flipping (1) parts."""
        parts = {0: [], 1: []}
        for (k, m), col in zip(module_basis(self.ring, self.rank), self.columns):
            for p in (0, 1):
                parts[p].append(tuple(
                    z2_grade(e)[(m.parity + p) % 2] for e in col))
        out = {}
        for p, cols in parts.items():
            op = self._with(cols, p)
            if not op.is_zero():
                out[p] = op
        return out

    def infer_parity(self) -> int | None:
        parts = self.parity_parts()
        if len(parts) > 1:
            return None
        return next(iter(parts), 0)

    def degree_pieces(self) -> dict[int, "LinearOperator"]:
        """Split into pieces shifting N-degree by a fixed amount."""
        ring = self.ring
        basis = module_basis(ring, self.rank)
        shifts = set()
        for (k, m), col in zip(basis, self.columns):
            d0 = ring.degree(m)
            for e in col:
                shifts.update(ring.degree(mm) - d0 for mm in e.terms)
        out = {}
        for s in sorted(shifts):
            cols = []
            for (k, m), col in zip(basis, self.columns):
                target = ring.degree(m) + s
                cols.append(tuple(
                    Element(ring, {mm: c for mm, c in e.terms.items() if ring.degree(mm) == target}, e.truncated)
                    for e in col))
            op = self._with(cols, None, f"{self.label}[{s:+d}]")
            op.parity = op.infer_parity()
            out[s] = op
        return out

    def __repr__(self):
        return f"LinearOperator({self.label or '?'}, rank={self.rank}, parity={self.parity})"


# -- delta maps --------------------------------------------------------------------


def delta(a: Element, op: LinearOperator) -> LinearOperator:
    """Commutative delta: aΦ - Φ•a."""
    return op.left_mul(a) - op.right_mul(a)


def graded_delta(a: Element, op: LinearOperator) -> LinearOperator:
    """aΦ - (-1)^{[a][Φ]} Φ•a; a non-homogeneous Φ is split by parity first."""
    pa = a.parity()
    if pa is None:
        even, odd = z2_grade(a)
        return graded_delta(even, op) + graded_delta(odd, op)
    if op.parity is not None:
        parts = {op.parity: op}
    else:
        parts = op.parity_parts()
    total = LinearOperator.zero(op.ring, op.rank)
    for p, part in parts.items():
        sign = -1 if pa * p else 1
        total = total + (part.left_mul(a) - part.right_mul(a).scale(sign))
    total.parity = None if len(parts) != 1 else (pa + next(iter(parts))) % 2
    return total


def order_of(op: LinearOperator, s_max: int = 4, graded: bool = True) -> int | None:
    """Smallest s with every generator delta chain of length s+1 killing
    ``op`` on certified basis vectors; None if that exceeds ``s_max``.

    Commutative chains run over generator multisets; graded chains over
    ordered tuples of homogeneous generators.
    """
    gens = op.ring.generators()
    step = graded_delta if graded else delta
    level = [(op, 0)]
    for s in range(s_max + 1):
        nxt = []
        seen = set()
        for X, start in level:
            for gi in range(start if not graded else 0, len(gens)):
                Y = step(gens[gi], X)
                if Y.is_zero():
                    continue
                sig = Y._signature()
                if sig in seen:
                    continue
                seen.add(sig)
                nxt.append((Y, gi))
        if not nxt:
            return s
        level = nxt
    return None


def order_with_elements(op: LinearOperator, elements, s_max: int = 3, graded: bool = True) -> int | None:
    """Order computed with chains over the given elements (all orderings)."""
    step = graded_delta if graded else delta
    level = [op]
    for s in range(s_max + 1):
        nxt = []
        for X in level:
            for a in elements:
                Y = step(a, X)
                if not Y.is_zero():
                    nxt.append(Y)
        if not nxt:
            return s
        level = nxt
    return None


def first_order_split(op: LinearOperator) -> tuple[Element, GradedDerivation]:
    """Δ = Δ(1)· + u with u a graded derivation."""
    if op.rank != 1:
        raise StructureError("first_order_split works on A itself")
    order = order_of(op, 1, graded=True)
    if order is None:
        raise ContractError("operator is not of order <= 1")
    ring = op.ring
    zero_order = op.apply(ring.one())
    rest = op - LinearOperator.multiplication(zero_order)
    u = GradedDerivation.from_values(ring, rest.apply)
    if any(e.truncated for e in u.coeffs()) or zero_order.truncated:
        raise ContractError("generator images are not certified at this truncation")
    rebuilt = LinearOperator.multiplication(zero_order) + LinearOperator.derivation(u)
    if not rebuilt.agrees(op):
        raise IntegrityError("first-order splitting failed to reproduce the operator")
    return zero_order, u


def n_graded_decompose(op: LinearOperator, s_max: int = 4) -> tuple[dict[int, LinearOperator], bool]:
    """N-degree pieces of Δ and whether each piece has Δ's graded order."""
    pieces = op.degree_pieces()
    s = order_of(op, s_max, graded=True)
    if s is None:
        return pieces, False
    ok = all((o := order_of(p, s_max, graded=True)) is not None and o <= s for p in pieces.values())
    return pieces, ok


def search_z2_not_n_witness(ring: RingSpec, atoms: list[LinearOperator], max_terms: int = 2,
                            coeffs=(1, -1), s_max: int = 3) -> dict:
    """Search sums of up to ``max_terms`` atoms for a Z2-graded operator whose
    N-pieces fail to share its order.  Returns a report with the witness (or
    None) and the bound searched."""
    tried = 0
    for k in range(1, max_terms + 1):
        for combo in combinations(range(len(atoms)), k):
            for signs in product(coeffs, repeat=k):
                op = atoms[combo[0]].scale(signs[0])
                for i, sg in zip(combo[1:], signs[1:]):
                    op = op + atoms[i].scale(sg)
                tried += 1
                if op.is_zero():
                    continue
                _, ok = n_graded_decompose(op, s_max)
                if not ok and order_of(op, s_max, graded=True) is not None:
                    return {"witness": op, "tried": tried, "atoms": len(atoms), "max_terms": max_terms}
    return {"witness": None, "tried": tried, "atoms": len(atoms), "max_terms": max_terms}


def derivation_leibniz_probe(u: GradedDerivation, probes) -> bool:
    """Leibniz on all probe pairs whose product stays inside the truncation."""
    for p in u.homogeneous_parts().values():
        for a in probes:
            for b in probes:
                if gmul(a, b).truncated:
                    continue
                if not check_leibniz(p, a, b):
                    return False
    return True
