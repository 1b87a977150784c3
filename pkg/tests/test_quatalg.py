import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from btquot.quatalg import (
    DiscriminantError,
    FixtureError,
    OrderClosureError,
    bundled_fixture,
    hilbert_symbol,
    load_order,
    order_from_dict,
    order_to_dict,
    prime_factors,
)
from conftest import FIXTURES, order

small = st.integers(-30, 30).filter(bool)


@given(small, small)
def test_hilbert_product_formula(a, b):
    places = set(prime_factors(abs(a))) | set(prime_factors(abs(b))) | {2}
    prod = hilbert_symbol(a, b, "inf")
    for q in places:
        prod *= hilbert_symbol(a, b, q)
    assert prod == 1


@pytest.mark.parametrize("name", FIXTURES)
def test_norm_is_multiplicative(name):
    ctx = order(name)
    rng = random.Random(1)
    for _ in range(50):
        x = tuple(rng.randint(-9, 9) for _ in range(4))
        y = tuple(rng.randint(-9, 9) for _ in range(4))
        assert ctx.nrd(ctx.mul(x, y)) == ctx.nrd(x) * ctx.nrd(y)
        assert ctx.to_element(x).reduced_norm() == ctx.nrd(x)


@pytest.mark.parametrize("name", FIXTURES)
def test_splitting_is_a_ring_map_with_det_nrd(name):
    ctx = order(name)
    mod = ctx.p**ctx.prec
    rng = random.Random(2)
    for _ in range(30):
        x = tuple(rng.randint(-20, 20) for _ in range(4))
        y = tuple(rng.randint(-20, 20) for _ in range(4))
        (a, b), (c, d) = ctx.iota(x)
        assert (a * d - b * c - ctx.nrd(x)) % mod == 0
        X, Y, XY = ctx.iota(x), ctx.iota(y), ctx.iota(ctx.mul(x, y))
        prod = tuple(tuple(sum(X[i][k] * Y[k][j] for k in range(2)) % mod for j in range(2)) for i in range(2))
        assert prod == XY


@pytest.mark.parametrize("name", FIXTURES)
def test_discriminant_matches_level(name):
    ctx = order(name)
    assert ctx.algebra.discriminant() == ctx.Nminus
    assert ctx.algebra.is_definite()


def _raw(name):
    import json

    return json.loads(bundled_fixture(name).read_text())


def test_roundtrip_through_dict():
    ctx = order("p2_N13_1")
    again = order_from_dict(order_to_dict(ctx))
    assert again.basis == ctx.basis and again.prec == ctx.prec


def test_non_integral_basis_rejected():
    data = _raw("p2_N13_1")
    data["basis"][1] = [str(Fraction(c) / 3) for c in data["basis"][1]]
    with pytest.raises((OrderClosureError, DiscriminantError)):
        order_from_dict(data)


def test_wrong_discriminant_rejected():
    data = _raw("p53_N2_1")
    data["Nminus"] = 3
    with pytest.raises(FixtureError):
        order_from_dict(data)


def test_non_maximal_order_rejected():
    data = _raw("p2_N13_1")
    data["basis"][0] = [str(2 * Fraction(c)) for c in data["basis"][0]]
    with pytest.raises(FixtureError):
        order_from_dict(data)


def test_missing_file(tmp_path):
    bad = tmp_path / "broken.json"
    bad.write_text("{not json")
    with pytest.raises(FixtureError):
        load_order(bad)
