import random

import pytest

from btquot import bttree as bt
from btquot.evaluate import random_gamma
from btquot.fundom import (
    compute_fundamental_domain,
    export_dot,
    genus_ogg,
    parse_dot_multigraph,
    quotient_graph,
    schottky_counts,
)
from btquot.harmonic import dim_formula
from conftest import FIXTURES, domain, order


@pytest.mark.parametrize("name", FIXTURES)
def test_genus_agrees_with_ogg_and_dimension_formula(name):
    D = domain(name)
    ctx = D.ctx
    g = 1 - D.V + D.E
    assert g == genus_ogg(ctx.p, ctx.Nminus, ctx.Nplus) == dim_formula(2, ctx.p * ctx.Nminus, ctx.Nplus)


def test_ogg_values():
    assert genus_ogg(2, 13, 1) == 2
    assert genus_ogg(53, 2, 1) == 4
    assert genus_ogg(211, 1511, 1) == 26425
    assert genus_ogg(11, 2, 1) == 0


def test_schottky_counts():
    assert schottky_counts(2, 2) == (2, 3)
    assert schottky_counts(53, 4) is None


@pytest.mark.parametrize("name", ["p2_N13_1", "p53_N2_1"])
def test_reverse_iteration_gives_the_same_quotient(name):
    D = domain(name)
    R = compute_fundamental_domain(order(name), reverse=True)
    assert (R.V, R.E) == (D.V, D.E)
    assert sorted(len(s) for s in R.vertex_stabilizers.values()) == sorted(len(s) for s in D.vertex_stabilizers.values())


@pytest.mark.parametrize("name", ["p2_N13_1", "p53_N2_1"])
def test_dot_roundtrip(name):
    Q = quotient_graph(domain(name))
    text = export_dot(Q)
    nodes, edges = parse_dot_multigraph(text)
    assert len(nodes) == len(Q.vertices) and len(edges) == len(Q.edges)
    assert export_dot(Q) == text


@pytest.mark.parametrize("name", ["p2_N13_1", "p53_N2_1"])
def test_quotient_is_p_plus_1_regular_in_weighted_sense(name):
    D = domain(name)
    for w, tab in D.tables.items():
        assert len(tab) == D.p + 1


@pytest.mark.parametrize("name", ["p2_N13_1", "p53_N2_1"])
def test_lookup_of_planted_translates(name):
    D = domain(name)
    ctx = D.ctx
    rng = random.Random(5)
    for _ in range(10):
        v = bt.V0
        for _ in range(rng.randint(0, 3)):
            v = rng.choice(bt.neighbours(v, ctx.p))
        e = rng.choice(bt.edges_out(v, ctx.p))
        i, g = D.lookup_edge(e)
        assert g.act(ctx, e, True) == D.reps[i]
        h = random_gamma(D, rng, 3)
        j, _ = D.lookup_edge(h.act(ctx, e, True))
        assert j == i


def test_fixture_2_13_is_schottky(D2):
    assert (D2.V, D2.E) == (2, 3)
    Q = quotient_graph(D2)
    assert Q.is_regular(3) and not Q.has_loops()
