import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from btquot.shimeq import (
    NAMED_INVARIANTS,
    PATTERN_F,
    PATTERN_G,
    GaugeError,
    RelationError,
    coordinate_orders,
    evaluate_invariant,
    find_relations,
    gauge_fix,
    in_span,
    integer_kernel,
    invariant_basis,
    matrix_rank,
    monomials,
    planted_samples,
    recognize_invariants,
    twisted_pattern,
    weight_matrix,
)

P = 53
A, B = -6, -3
MODEL_F = dict(zip(PATTERN_F, [2, 12, 2 * B, -17, 18 * A]))
MODEL_G = dict(zip(PATTERN_G, [5, 33, 3 * B, 15 * B, 16]))


def test_monomial_counts():
    assert len(monomials(2)) == 10 and len(monomials(3)) == 20
    assert monomials(2)[0] == (2, 0, 0, 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(2, 7), st.integers(0, 10**6))
def test_integer_kernel(nrows, ncols, seed):
    rng = random.Random(seed)
    M = [[rng.randint(-5, 5) for _ in range(ncols)] for _ in range(nrows)]
    K = integer_kernel(M, ncols)
    for v in K:
        assert all(sum(a * b for a, b in zip(r, v)) == 0 for r in M)
    assert len(K) == ncols - matrix_rank(M)


def test_invariant_basis_spans_the_named_ratios():
    basis = invariant_basis(PATTERN_F, PATTERN_G)
    W = weight_matrix(PATTERN_F, PATTERN_G)
    assert len(basis) == 10 - matrix_rank(W) == 6
    for v in NAMED_INVARIANTS.values():
        assert in_span(basis, v)
    projective = invariant_basis(PATTERN_F, PATTERN_G, projective=True)
    Wp = weight_matrix(PATTERN_F, PATTERN_G, projective=True)
    # x-degree is 2 on F and 3 on G, so only one degree row is independent
    assert len(projective) == 10 - matrix_rank(Wp) == 5


def exact_invariants(F, G):
    a = [Fraction(F[e]) for e in PATTERN_F]
    b = [Fraction(G[e]) for e in PATTERN_G]
    a = [x / a[0] for x in a]
    b = [x / b[0] for x in b]
    return {k: evaluate_invariant(v, a, b) for k, v in NAMED_INVARIANTS.items()}


def test_planted_genus_four_model_is_recovered_exactly():
    S = planted_samples(MODEL_F, MODEL_G, P, 30, 40, seed=1)
    R = find_relations(S, P)
    assert set(R.F.support()) == set(PATTERN_F) and set(R.G.support()) == set(PATTERN_G)
    assert R.quadric_dim == 1 and R.cubic_dim == 1
    rec = recognize_invariants(R)
    assert rec.ok and rec.values == exact_invariants(MODEL_F, MODEL_G)
    model = gauge_fix(rec, R, A, B)
    assert model.F == {"x0^2": 2, "x0*x2": 12, "x1^2": -6, "x2^2": -17, "x3^2": -108}
    assert model.G == {"x0^3": 5, "x0^2*x2": 33, "x0*x1^2": -9, "x1^2*x2": -45, "x2^3": 16}


@pytest.mark.parametrize("seed", range(3))
def test_planted_random_model_with_torus_twist(seed):
    rng = random.Random(seed)
    nz = lambda: rng.choice([-1, 1]) * rng.randint(1, 9)
    F = {e: nz() for e in PATTERN_F}
    G = {e: nz() for e in PATTERN_G}
    torus = [Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(4)]
    S = planted_samples(F, G, P, 30, 40, seed=seed, torus=torus)
    R = find_relations(S, P)
    rec = recognize_invariants(R)
    Ft, Gt = twisted_pattern(F, G, torus)
    assert rec.ok and rec.values == exact_invariants(Ft, Gt)


def test_too_few_samples_is_reported():
    S = planted_samples(MODEL_F, MODEL_G, P, 4, 40, seed=2)
    with pytest.raises(RelationError):
        find_relations(S, P)


def test_wrong_residual_square_class_is_rejected():
    S = planted_samples(MODEL_F, MODEL_G, P, 30, 40, seed=3)
    R = find_relations(S, P)
    rec = recognize_invariants(R)
    with pytest.raises(GaugeError):
        gauge_fix(rec, R, A * 2, B)  # 2 is a non-square unit at 53


def test_coordinate_orders_from_signs():
    # cocycle signs of w_2 and w_53 for four eigenforms
    signs = {2: [1, -1, 1, -1], 53: [-1, -1, -1, 1]}
    orders, twist = coordinate_orders(signs, 53)
    assert orders == [[0, 3, 2, 1], [2, 3, 0, 1]]
    assert twist == (1, 0)
    with pytest.raises(RelationError):
        coordinate_orders({2: [1, 1, 1, 1], 53: [1, 1, 1, 1]}, 53)
