import random
from fractions import Fraction

import pytest

from btquot.evaluate import (
    Evaluator,
    agreement_digits,
    covering,
    evaluate_many,
    modularity_defect,
    random_gamma,
    random_point,
    riemann_sum,
)
from btquot.overconvergent import lift
from btquot.padic import valuation
from conftest import domain, space


def _in_ball(g, t, p):
    a, b, c, d = g
    num, den = d * t - b, -c * t + a
    if den == 0:
        return False
    x = Fraction(num) / den
    return x == 0 or valuation(x, p) >= 0


@pytest.mark.parametrize("p", [2, 53])
def test_covering_partitions_the_boundary(p):
    rng = random.Random(p)
    for _ in range(10):
        z = random_point(p, rng, 30)
        balls = covering(z)
        assert len(balls) == p + 1
        for _ in range(20):
            t = Fraction(rng.randint(-10**6, 10**6), rng.choice([1, p, p**2, 7]))
            assert sum(_in_ball(g, t, p) for g in balls) == 1


@pytest.fixture(scope="module")
def forms2():
    H = space("p2_N13_1")
    return [lift(H, c, 40) for c in H.basis()]


def test_modularity_2_13_weight_2(forms2):
    rng = random.Random(1)
    D = domain("p2_N13_1")
    for f in forms2:
        ev = Evaluator(f)
        for _ in range(5):
            assert modularity_defect(ev, random_point(2, rng, 60), random_gamma(D, rng), 40) <= 3


def test_modularity_2_13_weight_4():
    H = space("p2_N13_1", 2)
    f = lift(H, H.basis()[0], 20)
    ev = Evaluator(f)
    rng = random.Random(2)
    for _ in range(3):
        assert modularity_defect(ev, random_point(2, rng, 40), random_gamma(H.D, rng), 20) <= 3


def test_riemann_sums_agree_with_the_integral(forms2):
    H = space("p2_N13_1")
    rng = random.Random(3)
    for f, c in zip(forms2, H.basis()):
        ev = Evaluator(f)
        for _ in range(3):
            z = random_point(2, rng, 40, spread=0)
            assert agreement_digits(riemann_sum(c, z, 3, 40), ev(z)) >= 2


def test_evaluate_many_matches_single_evaluation(forms2):
    z = random_point(2, random.Random(4), 60)
    many = evaluate_many(forms2, z)
    for f, v in zip(forms2, many):
        assert agreement_digits(Evaluator(f)(z), v) >= 30
