import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from seqreal.numerics import (
    ONE,
    ZERO,
    Dyadic,
    alpha,
    exp2_neg,
    isqrt_approx,
    metered,
    parse_dyadic,
    parse_number,
    rat_approx,
    render_decimal,
    round_to,
)

from conftest import rationals

dyadics = st.builds(Dyadic, st.integers(-(2**80), 2**80), st.integers(-90, 90))


def test_canonical_form():
    assert Dyadic(12, 0) == Dyadic(3, 2)
    assert (Dyadic(12, 0).mantissa, Dyadic(12, 0).exponent) == (3, 2)
    assert (Dyadic(0, 7).mantissa, Dyadic(0, 7).exponent) == (0, 0)
    assert repr(Dyadic(-5, -3)) == "Dyadic(-5, -3)"
    assert str(Dyadic(-5, -3)) == "-5*2^-3"


@given(dyadics, dyadics)
def test_arithmetic_matches_fractions(a, b):
    fa, fb = a.to_fraction(), b.to_fraction()
    assert (a + b).to_fraction() == fa + fb
    assert (a - b).to_fraction() == fa - fb
    assert (a * b).to_fraction() == fa * fb
    assert (-a).to_fraction() == -fa
    assert abs(a).to_fraction() == abs(fa)


@given(dyadics, st.integers(-40, 40))
def test_shift_is_exact_power_of_two(a, k):
    assert a.shift(k).to_fraction() == a.to_fraction() * Fraction(2) ** k


def test_comparison_against_fraction_on_random_pairs():
    rng = random.Random(20)
    for _ in range(10_000):
        a = Dyadic(rng.randint(-(2**40), 2**40), rng.randint(-50, 50))
        b = Dyadic(rng.randint(-(2**40), 2**40), rng.randint(-50, 50))
        fa, fb = a.to_fraction(), b.to_fraction()
        assert (a < b, a <= b, a == b, a > b) == (fa < fb, fa <= fb, fa == fb, fa > fb)


def test_equality_and_hash_agree_with_fraction():
    assert Dyadic(3, -1) == Fraction(3, 2)
    assert Dyadic(4) == 4
    assert hash(Dyadic(3, -1)) == hash(Fraction(3, 2))
    assert len({Dyadic(1), ONE, Fraction(1)}) == 1


def test_from_fraction_rejects_non_dyadic():
    assert Dyadic.from_fraction(Fraction(5, 8)) == Dyadic(5, -3)
    with pytest.raises(ValueError):
        Dyadic.from_fraction(Fraction(1, 3))


def test_round_to_is_half_even_on_grid():
    # Python's round() on Fraction is an independent half-to-even oracle
    for n in range(0, 6):
        for num in range(-200, 201):
            d = Dyadic(num, -8)
            got = round_to(d, n).to_fraction()
            want = Fraction(round(d.to_fraction() * 2**n), 2**n)
            assert got == want, (d, n)


@given(rationals(), st.integers(0, 60))
def test_rat_approx_truncates_toward_zero(q, n):
    r = rat_approx(q, n).to_fraction()
    assert abs(r - q) < Fraction(1, 2**n)
    assert abs(r) <= abs(q)
    assert r * 2**n == int(q * 2**n)


@given(rationals())
def test_alpha_is_bounded_transform(q):
    a = alpha(q)
    assert 0 <= a < 1
    assert a == abs(q) / (1 + abs(q))


def test_alpha_of_one_is_one_half():
    assert alpha(1) == Fraction(1, 2)


@given(st.integers(0, 2**60), st.integers(-40, 40), st.integers(0, 60))
def test_isqrt_approx_against_mpmath(m, e, n):
    d = Dyadic(m, e)
    r = isqrt_approx(d, n)
    with mpmath.workprec(400):
        exact = mpmath.sqrt(mpmath.mpf(m) * mpmath.mpf(2) ** e)
        err = abs(mpmath.mpf(r.mantissa) * mpmath.mpf(2) ** r.exponent - exact)
        assert err < mpmath.mpf(2) ** (-n)
    assert r * r <= d


def test_isqrt_rejects_negative():
    with pytest.raises(ValueError):
        isqrt_approx(Dyadic(-1), 3)


@given(st.integers(0, 2**20), st.integers(-16, 2), st.integers(0, 50))
def test_exp2_neg_against_mpmath(m, e, p):
    c = Dyadic(m, e)
    r = exp2_neg(c, p)
    with mpmath.workprec(600):
        exact = mpmath.mpf(2) ** (-(mpmath.mpf(m) * mpmath.mpf(2) ** e))
        got = mpmath.mpf(r.mantissa) * mpmath.mpf(2) ** r.exponent
        assert abs(got - exact) <= mpmath.mpf(2) ** (-p)


def test_exp2_neg_exact_points():
    assert exp2_neg(Dyadic(0), 10) == ONE
    assert exp2_neg(Dyadic(3), 10) == Dyadic(1, -3)
    assert exp2_neg(Dyadic(64), 10) == ZERO


def test_meter_charges_operand_bit_lengths():
    a, b = Dyadic(7), Dyadic(1, -4)  # 3 bits and 1 bit
    with metered() as meter:
        a + b
        a * b
        a.shift(5)
    assert meter.cost == (3 + 1) + (3 + 1 + 1)
    assert meter.ops == 2


@pytest.mark.parametrize(
    "text,value",
    [("3/4", Fraction(3, 4)), ("-7", Fraction(-7)), ("5*2^-3", Fraction(5, 8)), ("1*2^4", Fraction(16)), (" 2/6 ", Fraction(1, 3))],
)
def test_parse_number(text, value):
    assert parse_number(text) == value


@pytest.mark.parametrize("text", ["", "x", "1/0", "2^3", "1.5.2"])
def test_parse_number_rejects(text):
    with pytest.raises(ValueError):
        parse_number(text)


def test_parse_dyadic():
    assert parse_dyadic("3/4") == Dyadic(3, -2)
    with pytest.raises(ValueError):
        parse_dyadic("1/3")


@pytest.mark.parametrize(
    "value,text",
    [(Dyadic(3, -5), "0.09375"), (Dyadic(0), "0"), (Dyadic(-1, -1), "-0.5"), (Fraction(1, 3), "≈0.3333333333"), (Fraction(-2, 3), "≈-0.6666666667"), (Dyadic(1, -40), "≈0.0000000000")],
)
def test_render_decimal(value, text):
    assert render_decimal(value) == text
