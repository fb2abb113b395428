import json
import random
from itertools import product
from pathlib import Path

import pytest

from gradecalc.core import Element, RingSpec, gmul
from gradecalc.derivations import GradedDerivation, check_leibniz
from gradecalc.diffops import (LinearOperator, delta, first_order_split, graded_delta, n_graded_decompose,
                               order_of, order_with_elements, search_z2_not_n_witness)
from gradecalc.errors import ContractError

from helpers import rand_derivation, rand_element

FIXTURES = Path(__file__).parent / "fixtures"

R = RingSpec(2, 1, trunc=8)
x1, x2, c1 = R.x(1), R.x(2), R.c(1)
D1 = LinearOperator.derivation(GradedDerivation.partial_x(R, 1))
D2 = LinearOperator.derivation(GradedDerivation.partial_x(R, 2))
Dc = LinearOperator.derivation(GradedDerivation.partial_c(R, 1))
ID = LinearOperator.identity(R)


def mul(a):
    return LinearOperator.multiplication(a)


def naive_order(fn, parity, ring, s_max, graded=True):
    """Order by nested delta closures over ordered generator chains, tested on
    basis monomials low enough that no product overflows."""
    gens = [(g, g.parity()) for g in ring.generators()]

    def delta_fn(a, pa, f, pf):
        sign = -1 if graded and pa * pf else 1
        return lambda p: gmul(a, f(p)) - f(gmul(a, p)).scale(sign), (pa + pf) % 2

    for s in range(s_max + 1):
        probes = [Element.from_monomial(ring, m) for m in ring.basis(ring.trunc - 2 * (s + 1))]
        ok = True
        for chain in product(gens, repeat=s + 1):
            f, pf = fn, parity
            for a, pa in chain:
                f, pf = delta_fn(a, pa, f, pf)
            if any(f(p) for p in probes):
                ok = False
                break
        if ok:
            return s
    return None


def test_delta_examples():
    assert delta(x1, D1).agrees(ID.scale(-1))
    assert delta(x1, mul(x1)).is_zero()
    assert delta(R.one(), D1 @ D2 + mul(x1)).is_zero()


def test_graded_delta_examples():
    # c∂ + ∂c = 1, so the graded delta of ∂/∂c1 by c1 is +identity
    assert graded_delta(c1, Dc).agrees(ID)
    ring = RingSpec(0, 2)
    L = LinearOperator.multiplication(ring.c(2))
    assert graded_delta(ring.c(1), L).is_zero()
    assert graded_delta(c1, ID).is_zero()


def test_order_examples():
    assert order_of(mul(x1 * c1)) == 0
    assert order_of(D1) == 1
    assert order_of(Dc) == 1
    assert order_of(D1 @ D1) == 2
    assert order_of(D1 @ D1 @ D2) == 3
    assert order_of(mul(x2) @ D1 @ D1 @ D2 @ D2, s_max=3) is None


@pytest.mark.parametrize("n", [1, 2])
def test_orders_against_naive_oracle(n):
    ring = RingSpec(n, 1, trunc=8)
    d = [LinearOperator.derivation(GradedDerivation.partial_x(ring, i + 1)) for i in range(n)]
    dc = LinearOperator.derivation(GradedDerivation.partial_c(ring, 1))
    cases = [(LinearOperator.multiplication(ring.x(1)), 0), (d[0], 0), (dc, 1),
             (d[0] @ d[-1], 0), (d[0] @ dc, 1), (d[-1] @ d[0] @ d[0], 0)]
    for op, par in cases:
        assert order_of(op, 4) == naive_order(op.apply, par, ring, 4)


def test_compositions_add_orders():
    ops = [mul(x1 + c1), D1, D2, Dc, D1 @ D2]
    for a, b in product(ops, repeat=2):
        oa, ob = order_of(a), order_of(b)
        assert order_of(a @ b) <= oa + ob


def test_generator_sufficiency():
    rng = random.Random(4)
    ring = RingSpec(2, 1, trunc=6)
    d1 = LinearOperator.derivation(GradedDerivation.partial_x(ring, 1))
    dc = LinearOperator.derivation(GradedDerivation.partial_c(ring, 1))
    elements = ring.generators() + [rand_element(rng, ring, max_deg=1, parity=p) for p in (0, 0, 1, 1)]
    for op in (d1, dc, d1 @ dc, d1 @ d1, LinearOperator.multiplication(ring.x(2))):
        assert order_of(op, 3) == order_with_elements(op, elements, 3)


def test_first_order_split_examples():
    z, u = first_order_split(D1 + mul(x1))
    assert z == x1 and u == GradedDerivation.partial_x(R, 1)
    z, u = first_order_split(ID)
    assert z == R.one() and not u
    z, u = first_order_split(Dc)
    assert z == R.zero() and u == GradedDerivation.partial_c(R, 1)
    with pytest.raises(ContractError):
        first_order_split(D1 @ D1)


def test_split_of_random_first_order_operators():
    rng = random.Random(21)
    for _ in range(25):
        a = rand_element(rng, R, max_deg=1)
        u = rand_derivation(rng, R, max_deg=1)
        op = mul(a) + LinearOperator.derivation(u)
        z, v = first_order_split(op)
        assert z == a and v == u
        for part in v.homogeneous_parts().values():
            assert check_leibniz(part, x1 * c1, x2 + c1)


def test_zero_order_is_multiplication():
    rng = random.Random(8)
    for _ in range(10):
        a = rand_element(rng, R, max_deg=1)
        op = mul(a)
        assert order_of(op) == 0
        assert op.agrees(mul(op.apply(R.one())))


def test_order_grows_monotonically():
    assert order_of(D1, s_max=0) is None
    assert order_of(D1, s_max=1) == 1


def test_n_graded_examples():
    ring = RingSpec(0, 3)
    dc1 = LinearOperator.derivation(GradedDerivation.partial_c(ring, 1))
    pieces, ok = n_graded_decompose(dc1)
    assert set(pieces) == {-1} and ok
    op = dc1 + LinearOperator.multiplication(ring.c(1) * ring.c(2) * ring.c(3))
    pieces, ok = n_graded_decompose(op)
    assert set(pieces) == {-1, 3} and ok
    assert sum(pieces.values(), LinearOperator.zero(ring)).agrees(op)


def test_z2_not_n_witness_search_matches_fixture():
    ring = RingSpec(1, 2, trunc=3)
    atoms = [LinearOperator.derivation(GradedDerivation.partial_x(ring, 1)),
             LinearOperator.derivation(GradedDerivation.partial_c(ring, 1)),
             LinearOperator.derivation(GradedDerivation.partial_c(ring, 2, ring.c(1))),
             LinearOperator.multiplication(ring.x(1)),
             LinearOperator.multiplication(ring.c(1) * ring.c(2)),
             LinearOperator.projection(ring, 2)]
    report = search_z2_not_n_witness(ring, atoms, max_terms=2)
    expected = json.loads((FIXTURES / "z2_witness_search.json").read_text())
    summary = {"found": report["witness"] is not None, "tried": report["tried"],
               "atoms": report["atoms"], "max_terms": report["max_terms"]}
    assert summary == expected


def test_module_operators():
    ring = RingSpec(1, 1, trunc=4)
    mat = [[ring.x(1), ring.c(1)], [ring.zero(), ring.one()]]
    A = LinearOperator.matrix_action(ring, mat, 2)
    assert order_of(A) == 0
    D = LinearOperator.derivation(GradedDerivation.partial_x(ring, 1), rank=2)
    assert order_of(D) == 1
    assert order_of(D @ D) == 2


def test_left_right_multiplication():
    a = x1 + c1
    op = D1 @ D2
    for m in R.basis(3):
        p = Element.from_monomial(R, m)
        assert op.left_mul(a).apply(p) == gmul(a, op.apply(p))
        assert op.right_mul(a).apply(p) == op.apply(gmul(a, p))
