import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from btquot.overconvergent import OvercForm, exact_specialization_matches, lift, plan
from conftest import space


def _ord(m, p):
    v = 0
    while m % p == 0:
        m //= p
        v += 1
    return v


@pytest.mark.parametrize("N,p,Np,Nss", [(10, 53, 9, 10), (20, 2, 20, 24), (30, 53, 29, 30), (40, 2, 40, 45)])
def test_plan_values(N, p, Np, Nss):
    pl = plan(N, p)
    assert (pl.Nprime, pl.Nsecond) == (Np, Nss)


@given(st.integers(2, 80), st.sampled_from([2, 3, 5, 53]))
def test_plan_is_maximal(N, p):
    pl = plan(N, p)
    m = pl.Nprime
    assert m - _ord(m, p) < N
    assert all(k - _ord(k, p) >= N for k in range(m + 1, m + 4 * N))


@pytest.fixture(scope="module")
def lift2():
    H = space("p2_N13_1")
    c = H.basis()[0]
    return H, c, lift(H, c, 20)


def test_lift_residual_and_exact_specialization(lift2):
    H, c, form = lift2
    assert form.iterations == form.plan.Nprime + 3
    assert form.residual >= form.plan.Nsecond - 3
    assert exact_specialization_matches(form, c)


def test_lift_is_unique_under_random_padding(lift2):
    H, c, form = lift2
    for seed in (1, 2):
        other = lift(H, c, 20, pad="random", seed=seed)
        for m1, m2 in zip(form.moments, other.moments):
            for a, b in zip(m1, m2):
                d = a - b
                assert d.is_zero() or d.valuation() >= form.plan.Nsecond - 3


def test_json_roundtrip(lift2):
    H, c, form = lift2
    data = json.loads(json.dumps(form.to_json()))
    again = OvercForm.from_json(H, data)
    assert again.moments == form.moments and again.plan == form.plan


def test_higher_weight_lift_specializes_exactly():
    H = space("p2_N13_1", 2)
    c = H.basis()[1]
    form = lift(H, c, 15)
    assert exact_specialization_matches(form, c)
    assert form.residual >= form.plan.Nsecond - 3


def test_lift_53_weight_2():
    H = space("p53_N2_1")
    c = H.basis()[2]
    form = lift(H, c, 10)
    assert exact_specialization_matches(form, c)
    assert form.residual >= form.plan.Nsecond - 3
