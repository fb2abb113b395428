import random
from fractions import Fraction

import pytest

from gradecalc.core import Element, RingSpec
from gradecalc.diffops import LinearOperator, order_of
from gradecalc.derivations import GradedDerivation
from gradecalc.errors import ParseError, TruncationError
from gradecalc.forms import Form, exterior_d
from gradecalc.parser import parse, parse_derivation, parse_element, parse_form, parse_operator

from helpers import rand_element, rand_expression, rand_form
from oracles import from_element, from_form

R = RingSpec(2, 2, trunc=12)


def as_words(v):
    return from_form(v) if isinstance(v, Form) else from_element(v)


def test_documented_examples():
    v = parse(R, "c1*c2 + 3/2*x1^2")
    assert isinstance(v, Element) and len(v.terms) == 2
    assert v == R.c(1) * R.c(2) + (R.x(1) ** 2).scale(Fraction(3, 2))
    x1, c1 = R.x(1), R.c(1)
    assert parse(R, "d(x1*c1)") == Form.from_element(c1) * Form.dx(R, 1) + Form.from_element(x1) * Form.dc(R, 1)
    assert parse(R, "d(x1*c1)") == exterior_d(x1 * c1)
    assert parse(R, "c2*c1") == -(R.c(1) * R.c(2))
    assert str(parse(R, "c2*c1")) == "-c1*c2"


def test_powers_of_odd_and_dx_vanish():
    assert not parse(R, "dx1^2")
    assert not parse(R, "c1^2")
    assert parse(R, "dc1^2")
    assert parse(R, "dc1^2") == parse(R, "dc1*dc1")


def test_generated_expressions_match_oracle():
    rng = random.Random(0)
    for _ in range(300):
        text, words, _ = rand_expression(rng, R)
        assert as_words(parse(R, text)) == words, text


def test_round_trip_generated():
    rng = random.Random(1)
    for _ in range(300):
        text, _, _ = rand_expression(rng, R)
        v = parse(R, text)
        assert parse(R, str(v)) == v


def test_round_trip_random_values():
    rng = random.Random(2)
    for _ in range(100):
        e = rand_element(rng, R, terms=4)
        assert parse_element(R, str(e)) == e
        f = rand_form(rng, R, terms=4)
        assert parse_form(R, str(f)) == f


@pytest.mark.parametrize("text,pos", [("x1 +* 2", 5), ("x3", 1), ("c9*x1", 1), ("1/0", 3), ("(x1", 4),
                                      ("x1 $ 2", 4), ("x1^0", 4), ("x1 x2", 4)])
def test_syntax_errors_report_position(text, pos):
    with pytest.raises(ParseError) as info:
        parse(R, text)
    assert info.value.line == 1 and info.value.column == pos


def test_multiline_position():
    with pytest.raises(ParseError) as info:
        parse(R, "x1 +\n  x7")
    assert (info.value.line, info.value.column) == (2, 3)


def test_truncation_overflow():
    ring = RingSpec(1, 0, trunc=4)
    with pytest.raises(TruncationError):
        parse(ring, "x1^5")
    with pytest.raises(TruncationError):
        parse(ring, "x1^2*x1^3")
    assert parse(ring, "x1^4") == ring.x(1) ** 4


def test_element_vs_form_entry_points():
    with pytest.raises(ParseError):
        parse_element(R, "dx1")
    assert parse_form(R, "x1") == Form.from_element(R.x(1))


def test_parse_derivation():
    u = parse_derivation(R, "(x1 + c1*c2)*Dx1 - 2*Dc2")
    assert u == GradedDerivation.partial_x(R, 1, R.x(1) + R.c(1) * R.c(2)) \
        + GradedDerivation.partial_c(R, 2).left_mul(R.one().scale(-2))


def test_parse_operator():
    ring = RingSpec(2, 1, trunc=6)
    op = parse_operator(ring, "Dx1 o Dx1")
    d1 = LinearOperator.derivation(GradedDerivation.partial_x(ring, 1))
    assert op.agrees(d1 @ d1)
    assert order_of(op) == 2
    op = parse_operator(ring, "2*mul(x2) + Dc1 - id")
    expect = LinearOperator.multiplication(ring.x(2)).scale(2) \
        + LinearOperator.derivation(GradedDerivation.partial_c(ring, 1)) - LinearOperator.identity(ring)
    assert op.agrees(expect)
    assert parse_operator(ring, "proj(0)").apply(ring.x(1) + 3) == ring.scalar(3)


def test_operator_coefficients():
    ring = RingSpec(2, 1, trunc=8)
    op = parse_operator(ring, "(x2)*Dx1 + c1*Dc1 + mul(x1 + 2)")
    expect = LinearOperator.derivation(GradedDerivation.partial_x(ring, 1, ring.x(2))) \
        + LinearOperator.derivation(GradedDerivation.partial_c(ring, 1, ring.c(1))) \
        + LinearOperator.multiplication(ring.x(1) + 2)
    assert op.agrees(expect)
    assert parse_operator(ring, "(Dx1 + Dx2) o Dx1").agrees(parse_operator(ring, "Dx1 o Dx1 + Dx2 o Dx1"))
    with pytest.raises(ParseError):
        parse_operator(ring, "(x1)")
    with pytest.raises(ParseError):
        parse_operator(ring, "Dx1 o")
