import random
from fractions import Fraction
from itertools import product

import pytest

from gradecalc.core import RingSpec
from gradecalc.diffops import LinearOperator, graded_delta
from gradecalc.errors import ValidationError
from gradecalc.noncommutative import (Bimod, FDAlgebra, HomSpace, check_w265, commutative_order, compose,
                                      is_left_zero_order, left_order_filtration, multiplication_kernel_dim,
                                      omega_monomial, right_order_filtration, tensor, tensor_d,
                                      two_sided_filtration, two_sided_first_order, universal_d,
                                      universal_omega1)

M2 = FDAlgebra.matrix_algebra(2)
DUAL = FDAlgebra.dual_numbers()
G2 = FDAlgebra.grassmann(2)
ALGEBRAS = [FDAlgebra.scalars(), DUAL, M2, G2, FDAlgebra.grassmann(3)]


def regular(A):
    P = Bimod.regular(A)
    return P, HomSpace(P, P)


def rand_op(rng, n):
    return [[Fraction(rng.randint(-3, 3)) for _ in range(n)] for _ in range(n)]


def is_zero(m):
    return not any(x for row in m for x in row)


def test_omega1_examples():
    assert len(universal_omega1(M2)) == 12
    assert multiplication_kernel_dim(M2) == 12
    assert len(universal_omega1(DUAL)) == 2
    assert len(universal_omega1(FDAlgebra.scalars())) == 0


@pytest.mark.parametrize("A", ALGEBRAS, ids=lambda A: A.name)
def test_omega1_is_kernel_of_multiplication(A):
    assert len(universal_omega1(A)) == multiplication_kernel_dim(A) == A.dim * A.dim - A.dim
    assert check_w265(A)


@pytest.mark.parametrize("A", ALGEBRAS, ids=lambda A: A.name)
def test_universal_d_squares_to_zero(A):
    rng = random.Random(A.dim)
    for _ in range(10):
        factors = [[Fraction(rng.randint(-2, 2)) for _ in range(A.dim)] for _ in range(rng.randint(1, 3))]
        t = omega_monomial(A, factors)
        assert universal_d(A, factors) == tensor_d(A, t)
        assert not tensor_d(A, tensor_d(A, t))
    assert not tensor_d(A, tensor(A, A.unit))


def test_left_multiplication_by_non_central_element():
    P, hom = regular(M2)
    a = M2.basis(1)  # E12
    assert not M2.is_central(a)
    La = M2.left_matrix(a)
    assert not is_left_zero_order(La, M2, P, P)
    assert two_sided_first_order(La, M2, P, P)
    assert is_left_zero_order(M2.right_matrix(a), M2, P, P)
    assert is_left_zero_order(M2.left_matrix(M2.unit), M2, P, P)


def test_derivation_counts():
    assert len(FDAlgebra.scalars().derivations()) == 0
    assert len(DUAL.derivations()) == 1
    assert len(M2.derivations()) == 3


@pytest.mark.parametrize("A", [DUAL, M2, G2], ids=lambda A: A.name)
def test_derivations_are_two_sided_first_order(A):
    P, hom = regular(A)
    F = left_order_filtration(A, P, P, r_max=1)
    for D in A.derivations():
        assert two_sided_first_order(D, A, P, P)
        assert F.contains(1, D)
    for i in range(A.dim):
        ad = A.inner_derivation(A.basis(i))
        assert two_sided_first_order(ad, A, P, P)
        assert F.contains(1, ad)


@pytest.mark.parametrize("A", [DUAL, G2], ids=lambda A: A.name)
def test_compositions_of_derivations(A):
    P, hom = regular(A)
    F = left_order_filtration(A, P, P, r_max=3)
    rng = random.Random(7)
    ders = A.derivations()
    for r in range(4):
        for _ in range(6):
            ops = []
            for _ in range(r):
                D = [[Fraction(0)] * A.dim for _ in range(A.dim)]
                for B in ders:
                    c = rng.randint(-2, 2)
                    D = [[x + c * y for x, y in zip(u, v)] for u, v in zip(D, B)]
                ops.append(D)
            op = compose(*ops) if ops else A.left_matrix(A.unit)
            assert F.contains(r, op)


def test_random_operator_fails_first_order():
    P, _ = regular(M2)
    rng = random.Random(1)
    op = rand_op(rng, 4)
    assert not two_sided_first_order(op, M2, P, P)


@pytest.mark.parametrize("A", [DUAL, M2, G2], ids=lambda A: A.name)
def test_delta_maps_commute(A):
    P, hom = regular(A)
    rng = random.Random(2)
    for _ in range(5):
        op = rand_op(rng, A.dim)
        for i, j in product(range(A.dim), repeat=2):
            a, b = A.basis(i), A.basis(j)
            assert hom.delta(a, hom.delta_bar(b, op)) == hom.delta_bar(b, hom.delta(a, op))


def test_commutative_case_agrees_with_order():
    P, hom = regular(DUAL)
    rng = random.Random(3)
    ops = [rand_op(rng, 2) for _ in range(30)] + [hom.mat([int(k == i) for k in range(4)]) for i in range(4)]
    for op in ops:
        order = commutative_order(op, DUAL, P, P)
        assert two_sided_first_order(op, DUAL, P, P) == (order is not None and order <= 1)


def test_zero_order_level_is_linear_maps():
    P, hom = regular(DUAL)
    F = left_order_filtration(DUAL, P, P, r_max=2)
    assert F.dims() == [2, 3, 4]
    for i in range(hom.dim):
        op = hom.mat([int(k == i) for k in range(hom.dim)])
        assert F.contains(0, op) == is_left_zero_order(op, DUAL, P, P)


@pytest.mark.parametrize("A", [DUAL, M2, G2], ids=lambda A: A.name)
def test_right_filtration_modes_agree(A):
    P, _ = regular(A)
    literal = right_order_filtration(A, P, P, r_max=2)
    mirror = right_order_filtration(A, P, P, r_max=2, mirror=True)
    assert literal.dims() == mirror.dims()


def test_filtration_dims():
    P, _ = regular(M2)
    assert left_order_filtration(M2, P, P, r_max=2).dims() == [16, 16, 16]
    P, _ = regular(G2)
    assert left_order_filtration(G2, P, P, r_max=3).dims() == [6, 11, 15, 16]
    assert two_sided_filtration(G2, P, P).dims() == [6, 11, 15]


def test_ungraded_algebra_differs_from_graded_ring():
    # Λ(c1, c2) viewed as an ordinary algebra: c1 does not commute with c2
    P, hom = regular(G2)
    c1, c2 = G2.basis(1), G2.basis(2)
    assert not is_zero(hom.delta(c1, G2.left_matrix(c2)))
    ring = RingSpec(0, 2)
    L = LinearOperator.multiplication(ring.c(2))
    assert graded_delta(ring.c(1), L).is_zero()


def test_commutative_order_rejects_noncommutative():
    P, _ = regular(M2)
    with pytest.raises(ValidationError):
        commutative_order(M2.left_matrix(M2.unit), M2, P, P)


def test_bimodule_validation():
    with pytest.raises(ValidationError):
        Bimod(DUAL, 1, [[[1]], [[1]]], [[[1]], [[0]]])
    with pytest.raises(ValidationError):
        FDAlgebra(2, [[(1, 0), (0, 1)], [(0, 1), (1, 1)]], (0, 1))
    assert not M2.is_commutative() and DUAL.is_commutative()
