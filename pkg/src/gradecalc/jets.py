"""
First-order jets of the model ring and connections on free modules.

J^1 is computed one weight block at a time inside the graded tensor square
A ⊗ A, modulo the square of the kernel of multiplication.  Blocks live in
the untruncated ring (the relations are homogeneous), so dimensions are
exact.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .core import Element, Monomial, RingSpec, gmul, koszul_sign, z2_grade
from .derivations import GradedDerivation, apply as apply_derivation, superbracket
from .diffops import LinearOperator, order_of
from .errors import ContractError, StructureError
from .forms import Form, exterior_d, interior, wedge
from .linalg import Subspace, rank


def _tensor_mul(k1, k2):
    """(p⊗q)(r⊗s) = (-1)^{[q][r]} pr ⊗ qs on basis pairs; None if zero."""
    (p, q), (r, s) = k1, k2
    sign = -1 if (q.parity and r.parity) else 1
    s1, left = koszul_sign(p, r)
    if not s1:
        return None
    s2, right = koszul_sign(q, s)
    if not s2:
        return None
    return sign * s1 * s2, (left, right)


def _elem_tensor(a: Element, b: Element) -> dict:
    out = {}
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            out[(m1, m2)] = out.get((m1, m2), 0) + c1 * c2
    return out


def _mon_product(m1: Monomial, m2: Monomial):
    s, m = koszul_sign(m1, m2)
    return (s, m) if s else (0, None)


def jet_relation(ring: RingSpec, a: Monomial, b: Monomial) -> dict:
    """1⊗ab - (-1)^{[a][b]} b⊗a - a⊗b + ab⊗1 as a map (m1, m2) -> coefficient."""
    one = ring.unit_monomial()
    out: dict = {}

    def put(key, c):
        out[key] = out.get(key, 0) + c

    s, ab = _mon_product(a, b)
    if s:
        put((one, ab), s)
        put((ab, one), s)
    put((b, a), 1 if (a.parity and b.parity) else -1)
    put((a, b), -1)
    return {k: Fraction(v) for k, v in out.items() if v}


@dataclass
class JetModule:
    ring: RingSpec
    degree: int
    basis: list
    relations: Subspace

    @property
    def index(self) -> dict:
        return {k: i for i, k in enumerate(self.basis)}

    @property
    def dim(self) -> int:
        return len(self.basis) - len(self.relations)

    def vector(self, pairs: dict) -> dict:
        idx = self.index
        return {idx[k]: c for k, c in pairs.items() if c}

    def is_zero_class(self, pairs: dict) -> bool:
        return self.vector(pairs) in self.relations

    def d1(self, b: Element) -> dict:
        """d^1 b = 1⊗b - b⊗1 as pairs."""
        one = self.ring.one()
        out = _elem_tensor(one, b)
        for k, c in _elem_tensor(b, one).items():
            out[k] = out.get(k, 0) - c
        return {k: c for k, c in out.items() if c}

    def i1(self, a: Element) -> dict:
        return _elem_tensor(a, self.ring.one())

    def splitting_dim(self) -> int:
        """dim A_w + sum over generators of dim A_{w - deg(gen)}."""
        ring = self.ring
        w = self.degree
        total = len(ring.monomials_of_weight(w))
        for wt in ring.even_weights + ring.odd_weights:
            if w - wt >= 0:
                total += len(ring.monomials_of_weight(w - wt))
        return total


def _block_ring(ring: RingSpec, w: int) -> RingSpec:
    need = w // min(ring.even_weights) if ring.n_even else 0
    return ring if ring.trunc >= need else replace(ring, trunc=need)


def build_jet1(ring: RingSpec, w: int, full_generators: bool = False) -> JetModule:
    """Weight-``w`` block of J^1 = (A⊗A)/m^2.

    m^2 is spanned by (p⊗1)·rel(a, b); ``full_generators`` also multiplies
    by 1⊗q (used only to cross-check that the smaller set suffices).
    """
    ring = _block_ring(ring, w)
    mons = {k: ring.monomials_of_weight(k) for k in range(w + 1)}
    basis = [(m1, m2) for k in range(w + 1) for m1 in mons[k] for m2 in mons[w - k]]
    idx = {b: i for i, b in enumerate(basis)}
    rels = Subspace(len(basis))
    one = ring.unit_monomial()
    for wa in range(1, w + 1):
        for wb in range(1, w - wa + 1):
            for a in mons[wa]:
                for b in mons[wb]:
                    rel = jet_relation(ring, a, b)
                    rest = w - wa - wb
                    lefts = [(p, one) for p in mons[rest]]
                    if full_generators:
                        lefts = [(p, q) for k in range(rest + 1) for p in mons[k] for q in mons[rest - k]]
                    for pq in lefts:
                        vec = {}
                        for key, c in rel.items():
                            r = _tensor_mul(pq, key)
                            if r:
                                vec[idx[r[1]]] = vec.get(idx[r[1]], 0) + r[0] * c
                        rels.add(vec)
    return JetModule(ring, w, basis, rels)


def jet_to_forms(J: JetModule, pairs: dict) -> tuple[Element, Form]:
    """The identification a⊗b -> (ab, a·db) of J^1 with A ⊕ Ω^1."""
    ring = J.ring
    zero = ring.zero()
    func = zero
    form = Form(ring)
    for (m1, m2), c in pairs.items():
        a = Element.from_monomial(ring, m1, c)
        b = Element.from_monomial(ring, m2)
        func = func + gmul(a, b)
        form = form + wedge(Form.from_element(a), exterior_d(Form.from_element(b)))
    return func, form


def identification_is_isomorphism(J: JetModule) -> bool:
    """Ψ: a⊗b -> (ab, a db) kills exactly the relation span."""
    images = []
    keys: dict = {}
    for pair in J.basis:
        f, phi = jet_to_forms(J, {pair: Fraction(1)})
        vec = {}
        for m, c in f.terms.items():
            vec[keys.setdefault(("f", m), len(keys))] = c
        for k, c in phi.terms.items():
            vec[keys.setdefault(("w", k), len(keys))] = c
        images.append(vec)
    for v in J.relations.basis():
        f, phi = jet_to_forms(J, {J.basis[i]: c for i, c in enumerate(v) if c})
        if f or phi:
            return False
    return rank(images) == J.dim


def duality_pairing(u: GradedDerivation, omega) -> Element:
    """f_u(ω) for a one-form ω; f_u(d a) = u(a), graded A-linear."""
    omega = Form.coerce(omega, u.ring)
    if any(f.degree != 1 for _, f in omega.terms):
        raise StructureError("duality pairing takes a one-form")
    return interior(u, omega).to_element() if omega else u.ring.zero()


class JetFactorization:
    """The A-linear map 𝔣 on J^1 with 𝔣(1⊗b) = Δ(b)."""

    def __init__(self, op: LinearOperator):
        self.op = op
        self.ring = op.ring
        self.parts = op.parity_parts() if op.parity is None else {op.parity: op}

    def on_pair(self, a: Element, b: Element) -> Element:
        out = self.ring.zero()
        for p, part in self.parts.items():
            for pa, ap in enumerate(z2_grade(a)):
                if ap:
                    out = out + gmul(ap, part.apply(b)).scale(-1 if p * pa else 1)
        return out

    def on_pairs(self, pairs: dict) -> Element:
        out = self.ring.zero()
        for (m1, m2), c in pairs.items():
            out = out + self.on_pair(Element.from_monomial(self.ring, m1, c), Element.from_monomial(self.ring, m2))
        return out

    def on_i1(self, a: Element) -> Element:
        return self.on_pair(a, self.ring.one())

    def on_d1(self, b: Element) -> Element:
        return self.op.apply(b) - self.on_pair(b, self.ring.one())

    def check_block(self, w: int) -> bool:
        """𝔣 kills every relation of block w and 𝔣(J^1 b) = Δ(b) there.

        Only values computed without overflow are compared."""
        J = build_jet1(self.ring, w)
        if J.ring != self.ring:
            raise ContractError(f"block {w} exceeds the operator's truncation")
        for v in J.relations.basis():
            val = self.on_pairs({J.basis[i]: c for i, c in enumerate(v) if c})
            if not val.truncated and val:
                return False
        for m in self.ring.monomials_of_weight(w):
            b = Element.from_monomial(self.ring, m)
            val = self.on_pairs(J.d1(b)) + self.on_i1(b)
            ref = self.op.apply(b)
            if not (val.truncated or ref.truncated) and val != ref:
                return False
        return True


def factor_through_jet(op: LinearOperator) -> JetFactorization:
    if op.rank != 1:
        raise StructureError("jet factorisation is implemented for P = A")
    if order_of(op, 1, graded=True) is None:
        raise ContractError("operator is not of order <= 1")
    return JetFactorization(op)


class Connection:
    """∇_u = u (componentwise) + Σ_g u^g ω_g on the free module A^r.

    ``omegas`` holds one r x r matrix of Elements per generator, even
    generators first. Entries for an odd generator must be odd so that
    ∇_u has the parity of u.
    """

    def __init__(self, ring: RingSpec, rank: int, omegas=None):
        gens = ring.n_even + ring.n_odd
        if omegas is None:
            omegas = [[[ring.zero()] * rank for _ in range(rank)] for _ in range(gens)]
        if len(omegas) != gens or any(len(w) != rank or any(len(r) != rank for r in w) for w in omegas):
            raise StructureError("connection needs one r x r matrix per generator")
        for g, w in enumerate(omegas):
            want = 0 if g < ring.n_even else 1
            if any(e and e.parity() != want for r in w for e in r):
                raise StructureError(f"connection matrix {g + 1} must have parity {want}")
        self.ring = ring
        self.rank = rank
        self.omegas = [[list(r) for r in w] for w in omegas]

    def covariant(self, u: GradedDerivation, vec) -> tuple:
        ring = self.ring
        vec = tuple(vec)
        out = [apply_derivation(u, e) for e in vec]
        for g, coef in enumerate(u.coeffs()):
            if not coef:
                continue
            w = self.omegas[g]
            for i in range(self.rank):
                acc = ring.zero()
                for j in range(self.rank):
                    if w[i][j]:
                        acc = acc + gmul(w[i][j], vec[j])
                out[i] = out[i] + gmul(coef, acc)
        return tuple(out)

    def nabla(self, u: GradedDerivation) -> LinearOperator:
        if self.rank == 1:
            fn = lambda e: self.covariant(u, (e,))[0]
        else:
            fn = lambda v: self.covariant(u, v)
        return LinearOperator.from_function(self.ring, fn, self.rank, u.parity(), f"∇[{u}]")

    def check_leibniz(self, u: GradedDerivation, probes) -> bool:
        """∇_u(a p) = u(a) p + (-1)^{[u][a]} a ∇_u(p) on basis sections p."""
        ring = self.ring
        pu = u.parity()
        if pu is None:
            raise StructureError("Leibniz check needs a homogeneous derivation")
        for k in range(self.rank):
            p = tuple(ring.one() if j == k else ring.zero() for j in range(self.rank))
            for a in probes:
                ap = tuple(gmul(a, e) for e in p)
                lhs = self.covariant(u, ap)
                ua = apply_derivation(u, a)
                nab = self.covariant(u, p)
                rhs = []
                for i in range(self.rank):
                    r = gmul(ua, p[i])
                    for pa, part in enumerate(z2_grade(a)):
                        if part:
                            r = r + gmul(part, nab[i]).scale(-1 if pa * pu else 1)
                    rhs.append(r)
                if any((x.truncated or y.truncated) for x, y in zip(lhs, rhs)):
                    continue
                if tuple(lhs) != tuple(rhs):
                    return False
        return True


def curvature(conn: Connection, u: GradedDerivation, v: GradedDerivation) -> LinearOperator:
    """R(u, v) = [∇_u, ∇_v] - ∇_{[u, v]} (graded commutator on parity parts)."""
    total = LinearOperator.zero(conn.ring, conn.rank)
    for pu, uu in u.homogeneous_parts().items():
        for pv, vv in v.homogeneous_parts().items():
            nu, nv = conn.nabla(uu), conn.nabla(vv)
            sign = -1 if pu * pv else 1
            total = total + (nu @ nv) - (nv @ nu).scale(sign) - conn.nabla(superbracket(uu, vv))
    total.parity = None
    total.parity = total.infer_parity()
    return total
