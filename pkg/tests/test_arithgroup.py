import random

import pytest

from btquot import bttree as bt
from btquot.arithgroup import GammaElement, are_equivalent, elements_of_norm, equivalences, stabilizer
from conftest import domain, order


def random_gamma(ctx, rng, length=2):
    """A random word in the boundary pairings of the fundamental domain."""
    from btquot import evaluate

    name = {2: "p2_N13_1", 53: "p53_N2_1"}[ctx.p]
    return evaluate.random_gamma(domain(name), rng, length)


def random_vertex(rng, p, depth):
    v = bt.V0
    for _ in range(depth):
        v = rng.choice(bt.neighbours(v, p))
    return v


@pytest.mark.parametrize("name", ["p2_N13_1", "p53_N2_1"])
def test_planted_vertex_equivalence_is_recovered(name):
    ctx = order(name)
    rng = random.Random(11)
    for _ in range(5):
        v = random_vertex(rng, ctx.p, rng.randint(0, 3))
        g = random_gamma(ctx, rng, 1)
        w = g.act(ctx, v, False)
        h = are_equivalent(v, w, ctx)
        assert h is not None and h.act(ctx, v, False) == w


@pytest.mark.parametrize("name", ["p2_N13_1", "p53_N2_1"])
def test_planted_edge_equivalence_is_recovered(name):
    ctx = order(name)
    rng = random.Random(12)
    for _ in range(5):
        v = random_vertex(rng, ctx.p, 2)
        e = rng.choice(bt.edges_out(v, ctx.p))
        g = random_gamma(ctx, rng, 1)
        f = g.act(ctx, e, True)
        found = equivalences(e, f, ctx, edge=True)
        assert found and all(h.act(ctx, e, True) == f for h in found)


def test_odd_distance_is_never_equivalent(ctx2):
    v1 = bt.neighbours(bt.V0, 2)[0]
    assert are_equivalent(bt.V0, v1, ctx2) is None


def test_stabilizers_are_trivial_for_2_13(D2):
    assert all(len(s) == 1 for s in D2.vertex_stabilizers.values())


def test_group_operations(ctx53):
    rng = random.Random(3)
    g = random_gamma(ctx53, rng, 1)
    h = random_gamma(ctx53, rng, 1)
    one = GammaElement.identity(ctx53)
    assert g.compose(ctx53, g.inverse(ctx53)).is_identity(ctx53)
    v = random_vertex(rng, 53, 2)
    assert g.compose(ctx53, h).act(ctx53, v, False) == g.act(ctx53, h.act(ctx53, v, False), False)
    assert stabilizer(v, ctx53)[0] == one


def test_elements_of_small_norm(ctx2):
    els = elements_of_norm(ctx2, 3)
    assert els and all(ctx2.nrd(x) == 3 for x in els)
