from fractions import Fraction

import pytest

from rowpade import Context, Exact, ExactValueNeeded, UsageError, parse_exact
from rowpade.scalars import LogConstant, format_exact


def test_rational_arithmetic_is_exact():
    a = Exact(Fraction(1, 3), Fraction(2, 7))
    b = Exact(Fraction(-5, 11), Fraction(1, 2))
    assert (a + b) - b == a
    assert (a * b) / b == a
    assert -(-a) == a


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        Exact(1) / Exact(0)


def test_tagged_constants_combine_linearly():
    log3 = Exact(0, 0, ((LogConstant(Fraction(3)), Fraction(1), Fraction(0)),))
    x = Exact(2) + log3
    y = x - log3
    assert y == Exact(2)
    scaled = log3 * Exact(Fraction(5, 2))
    assert scaled.sym[0][1] == Fraction(5, 2)


def test_tagged_product_raises():
    log3 = Exact(0, 0, ((LogConstant(Fraction(3)), Fraction(1), Fraction(0)),))
    with pytest.raises(ExactValueNeeded):
        log3 * log3
    with pytest.raises(ExactValueNeeded):
        Exact(1) / log3


def test_tagged_to_float_matches_mpmath(exact_ctx):
    log3 = Exact(0, 0, ((LogConstant(Fraction(3)), Fraction(1), Fraction(0)),))
    value = (Exact(2) + log3).to_mpc(exact_ctx.mp)
    expected = 2 + exact_ctx.mp.log(3)
    assert abs(value - expected) < exact_ctx.mp.mpf(2) ** -200


def test_parse_exact_literals():
    assert parse_exact("3/4") == Exact(Fraction(3, 4))
    assert parse_exact(5) == Exact(5)
    assert parse_exact("0.25") == Exact(Fraction(1, 4))
    assert parse_exact({"re": "1/2", "im": "-2"}) == Exact(Fraction(1, 2), -2)
    with pytest.raises(UsageError):
        parse_exact("not-a-number")
    with pytest.raises(UsageError):
        parse_exact({"re": 0, "imaginary": 1})


def test_format_exact_round_trips():
    value = Exact(Fraction(-28, 31))
    assert format_exact(value) == "-28/31"
    z = Exact(Fraction(1, 2), Fraction(3))
    assert parse_exact(format_exact(z)) == z


def test_context_validation():
    with pytest.raises(UsageError):
        Context("symbolic", 256)
    with pytest.raises(UsageError):
        Context("float", 32)


def test_context_tolerances_scale_with_precision():
    small = Context("float", 128)
    big = Context("float", 512)
    assert float(big.cluster_radius) < float(small.cluster_radius)
    assert float(big.root_tol) < float(small.root_tol)
