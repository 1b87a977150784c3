import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from btquot import _enum_py, lattice
from btquot.lattice import gram, lll_gram, minimum, short_vectors


def random_gram(rng, n=4, size=6):
    while True:
        B = [[rng.randint(-size, size) for _ in range(n)] for _ in range(n)]
        G = [[sum(B[i][k] * B[j][k] for k in range(n)) for j in range(n)] for i in range(n)]
        det = _det(G)
        if det:
            return G


def _det(M):
    from btquot.quatalg import _det as d

    return d(M)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_lll_is_unimodular_and_preserves_the_form(seed):
    G = random_gram(random.Random(seed))
    U, R = lll_gram(G)
    assert abs(_det(U)) == 1
    assert R == gram(U, G)
    # size reduction and ordering of the first vector
    assert R[0][0] <= max(G[i][i] for i in range(4))


def brute_short(G, bound, box=6):
    out = set()
    for x in itertools.product(range(-box, box + 1), repeat=len(G)):
        if any(x):
            v = sum(x[i] * G[i][j] * x[j] for i in range(len(G)) for j in range(len(G)))
            if v <= bound:
                k = next(k for k, c in enumerate(x) if c)
                out.add(tuple(x) if x[k] > 0 else tuple(-c for c in x))
    return sorted(out)


@pytest.mark.parametrize("seed", range(5))
def test_short_vectors_match_brute_force(seed):
    rng = random.Random(seed)
    n = 3
    G = [[6, 1, 0], [1, 5, 2], [0, 2, 7]] if seed == 0 else None
    if G is None:
        while True:
            G = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
            G = [[G[i][j] + G[j][i] + (12 if i == j else 0) for j in range(n)] for i in range(n)]
            if _det(G) > 0 and all(_det([r[:k] for r in G[:k]]) > 0 for k in (1, 2)):
                break
    assert short_vectors(G, 30) == brute_short(G, 30)


def test_minimum_of_d4():
    D4 = [[2, -1, 0, 0], [-1, 2, -1, -1], [0, -1, 2, 0], [0, -1, 0, 2]]
    m, vecs = minimum(D4)
    assert m == 2 and len(vecs) == 12


def test_compiled_and_pure_enumeration_agree():
    pytest.importorskip("btquot._enum")
    from btquot import _enum

    rng = random.Random(7)
    for _ in range(10):
        G = random_gram(rng)
        U, R = lll_gram(G)
        q = lattice._float_cholesky(R)
        bound = float(max(R[i][i] for i in range(4))) * 2
        assert sorted(_enum.enumerate_short(q, bound)) == sorted(_enum_py.enumerate_short(q, bound))
