from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from btquot.padic import (
    NoSquareRoot,
    PadicNumber,
    PadicQuadElement,
    PrecisionError,
    hensel_sqrt,
    is_square_padic,
    legendre,
    parse_point,
    rational_reconstruct,
    valuation,
)

PRIMES = [2, 3, 5, 53]
nonzero = st.integers(min_value=-10**12, max_value=10**12).filter(bool)
rationals = st.builds(Fraction, nonzero, st.integers(min_value=1, max_value=10**6))


def pn(p, x, prec=30):
    return PadicNumber.from_rational(p, x, prec)


@given(st.sampled_from(PRIMES), rationals, rationals)
def test_ring_operations_match_rationals(p, x, y):
    a, b = pn(p, x), pn(p, y)
    for got, want in ((a + b, x + y), (a - b, x - y), (a * b, x * y), (a / b, x / y)):
        if want == 0:
            assert got.is_zero()
            continue
        ref = pn(p, want, got.prec)
        assert (got - ref).is_zero()


@given(st.sampled_from(PRIMES), rationals)
def test_string_roundtrip(p, x):
    a = pn(p, x)
    assert PadicNumber.from_string(a.to_string()) == a


@given(st.sampled_from(PRIMES), st.integers(-500, 500), st.integers(1, 500))
def test_rational_reconstruction_recovers_small_fractions(p, num, den):
    x = Fraction(num, den)
    if x and valuation(x.denominator, p):
        x *= p ** valuation(x.denominator, p)
    assert rational_reconstruct(pn(p, x, 60)) == x


def test_reconstruction_reports_failure_at_low_precision():
    assert rational_reconstruct(pn(53, Fraction(123456789, 1000003), 12)) is None


@given(st.sampled_from([3, 5, 53]), st.integers(1, 10**9))
def test_hensel_sqrt_squares_back(p, a):
    sq = pn(p, a * a, 40)
    r = hensel_sqrt(sq)
    assert (r * r - sq).is_zero()


def test_non_residue_has_no_root():
    with pytest.raises(NoSquareRoot):
        hensel_sqrt(pn(5, 2))


@settings(max_examples=50)
@given(st.sampled_from([3, 5, 53]), st.integers(1, 10**6).filter(lambda x: x % 53 and x % 5 and x % 3))
def test_square_class(p, u):
    if u % p == 0:
        return
    assert is_square_padic(pn(p, u)) == (legendre(u, p) == 1)
    assert not is_square_padic(pn(p, u * p))


@given(st.sampled_from(PRIMES), rationals, rationals, rationals, rationals)
def test_quadratic_field_division(p, a, b, c, d):
    x = PadicQuadElement.from_ints(p, a, b, 40)
    y = PadicQuadElement.from_ints(p, c, d, 40)
    z = (x * y) / y
    assert (z - x).a.valuation() >= 10 + min(x.valuation(), 0) or (z - x).a.is_zero()
    n = x.norm()
    assert (n - (x * x.conjugate()).a).is_zero()


def test_parse_point():
    z = parse_point("3+1/2*w", 5, 20)
    assert z.a == pn(5, 3, 20) and z.b == pn(5, Fraction(1, 2), 20)


def test_exact_operand_does_not_limit_precision():
    x = pn(2, Fraction(3, 7), 40)
    assert (x * 3).relprec == x.relprec


def test_precision_error_on_insufficient_digits():
    with pytest.raises(PrecisionError):
        pn(5, 7, 3).residue(5)
