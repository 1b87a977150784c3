"""Acceptance criteria 1-10; each test prints one PASS/FAIL line."""

import contextlib
import random
import time

import pytest

from btquot import bttree as bt
from btquot.evaluate import (
    Evaluator,
    agreement_digits,
    modularity_defect,
    random_gamma,
    random_point,
    riemann_sum,
)
from btquot.fundom import compute_fundamental_domain, genus_ogg, quotient_graph, schottky_counts
from btquot.harmonic import HarmonicSpace, dim_formula
from btquot.overconvergent import exact_specialization_matches, lift
from btquot.quatalg import FIXTURE_DIR, bundled_fixture, load_order
from btquot.shimeq import (
    PATTERN_F,
    PATTERN_G,
    equations,
    find_relations,
    gauge_fix,
    planted_samples,
    recognize_invariants,
)
from conftest import ACCEPTANCE, FIXTURES, domain, space


@contextlib.contextmanager
def criterion(k, capsys, detail):
    ok = False
    info = {"detail": detail}
    try:
        yield info
        ok = True
    finally:
        ACCEPTANCE.append((k, ok, info["detail"]))
        with capsys.disabled():
            print(f"\ncriterion {k}: {'PASS' if ok else 'FAIL'}  {info['detail']}")


def _fresh_domain(name):
    t = time.perf_counter()
    D = compute_fundamental_domain(load_order(bundled_fixture(name)))
    return D, time.perf_counter() - t


def test_criterion_01_quotient_2_13(capsys):
    with criterion(1, capsys, "(2,13,1): V=2, E=3, trivial stabilizers, genus 2, Schottky, < 10 s") as c:
        D, dt = _fresh_domain("p2_N13_1")
        c["detail"] += f"  [V={D.V} E={D.E} in {dt:.2f}s]"
        assert (D.V, D.E) == (2, 3)
        assert all(len(s) == 1 for s in D.vertex_stabilizers.values())
        assert D.genus() == 2
        assert schottky_counts(2, D.genus()) == (D.V, D.E)
        assert quotient_graph(D).is_regular(3)
        assert dt < 10


def test_criterion_02_quotient_53_2(capsys):
    with criterion(2, capsys, "(53,2,1): V=2, E=5, genus 4, < 5 min") as c:
        D, dt = _fresh_domain("p53_N2_1")
        c["detail"] += f"  [V={D.V} E={D.E} in {dt:.2f}s]"
        assert (D.V, D.E, D.genus()) == (2, 5, 4)
        assert dt < 300


def test_criterion_03_genus_consistency(capsys):
    with criterion(3, capsys, "1 - V + E = Ogg = dim_formula(2, pN-, N+) on every bundled fixture") as c:
        names = sorted(p.stem for p in FIXTURE_DIR.glob("*.json"))
        rows = []
        for name in names:
            D = domain(name)
            ctx = D.ctx
            g = (1 - D.V + D.E, genus_ogg(ctx.p, ctx.Nminus, ctx.Nplus), dim_formula(2, ctx.p * ctx.Nminus, ctx.Nplus))
            rows.append(f"{name}:{g[0]}")
            assert g[0] == g[1] == g[2]
        c["detail"] += f"  [{', '.join(rows)}]"


def test_criterion_04_ogg_values(capsys):
    with criterion(4, capsys, "Ogg genus: (2,13,1)=2, (53,2,1)=4, (211,1511,1)=26425"):
        assert genus_ogg(2, 13, 1) == 2
        assert genus_ogg(53, 2, 1) == 4
        assert genus_ogg(211, 1511, 1) == 26425


def test_criterion_05_harmonic_dimensions(capsys):
    with criterion(5, capsys, "harmonic dims, weights 2-8 on (2,13,1) and 2 on (53,2,1); relations exact") as c:
        got = []
        for name, k in [("p2_N13_1", 2), ("p2_N13_1", 4), ("p2_N13_1", 6), ("p2_N13_1", 8), ("p53_N2_1", 2)]:
            H = space(name, k - 2)
            B = H.basis()
            ctx = H.ctx
            assert len(B) == dim_formula(k, ctx.p * ctx.Nminus, ctx.Nplus)
            for b in B:
                d = H.defect(b)
                assert d is None or d >= H.basis_prec
            got.append(f"{name} k={k}:{len(B)}")
        c["detail"] += f"  [{', '.join(got)}]"


def test_criterion_06_lift(capsys):
    with criterion(6, capsys, "(2,13,1) weight 2 lift: residual <= p^-(N''-3) after N'+3 steps, exact specialization") as c:
        H = space("p2_N13_1")
        for N in (20, 40):
            for b in H.basis():
                f = lift(H, b, N)
                assert f.iterations == f.plan.Nprime + 3
                assert f.residual >= f.plan.Nsecond - 3
                assert exact_specialization_matches(f, b)
        c["detail"] += f"  [N=40: N'={f.plan.Nprime}, N''={f.plan.Nsecond}, residual valuation {f.residual}]"


@pytest.mark.parametrize("name", ["p2_N13_1", "p53_N2_1"])
def test_criterion_07_modularity(capsys, name):
    with criterion(7, capsys, f"{name}: 20 random (gamma, z), modularity defect <= 3 digits at N=40") as c:
        H = space(name)
        D = domain(name)
        rng = random.Random(7)
        # deep points cost up to ~depth digits of relative precision, so the moments carry 10 extra
        ev = [Evaluator(lift(H, b, 40, M=50)) for b in H.basis()]
        worst = -99
        for i in range(20):
            z = random_point(D.p, rng, 80)
            g = random_gamma(D, rng, rng.randint(1, 3))
            worst = max(worst, modularity_defect(ev[i % len(ev)], z, g, 40))
        c["detail"] += f"  [worst defect {worst}]"
        assert worst <= 3


def test_criterion_07_riemann_sums(capsys):
    with criterion(7, capsys, "(2,13,1): Riemann sums at depth 3 agree to >= 2 digits") as c:
        H = space("p2_N13_1")
        rng = random.Random(17)
        worst = 99
        for b in H.basis():
            ev = Evaluator(lift(H, b, 40))
            for _ in range(5):
                z = random_point(2, rng, 60, spread=0)
                worst = min(worst, agreement_digits(riemann_sum(b, z, 3, 60), ev(z)))
        c["detail"] += f"  [least agreement {worst} digits]"
        assert worst >= 2


def test_criterion_08_equations(capsys):
    with criterion(8, capsys, "(53,2,1) at 30 digits, 30 samples: supports, six invariants, final (F, G), < 30 min") as c:
        t = time.perf_counter()
        res = equations(domain("p53_N2_1"), 30, 30, -6, -3)
        dt = time.perf_counter() - t
        c["detail"] += f"  [{dt:.1f}s]"
        R = res.relations
        assert set(R.F.support()) == set(PATTERN_F)
        assert set(R.G.support()) == set(PATTERN_G)
        from fractions import Fraction as Q

        want = [Q(25, 9), Q(10, 3), Q(-17, 18), Q(16, 135), Q(125, 27), Q(55, 9)]
        assert list(res.recognized.values.values()) == want
        assert res.model.F == {"x0^2": 2, "x0*x2": 12, "x1^2": -6, "x2^2": -17, "x3^2": -108}
        assert res.model.G == {"x0^3": 5, "x0^2*x2": 33, "x0*x1^2": -9, "x1^2*x2": -45, "x2^3": 16}
        assert res.to_json()["status"] == "CONJECTURAL"
        assert dt < 1800


def test_criterion_09_plant_and_recover(capsys):
    with criterion(9, capsys, "planted equivalences, lookups, lift uniqueness and equation model are recovered"):
        # equivalence and lookup: translate an edge by a planted gamma
        for name in ("p2_N13_1", "p53_N2_1"):
            D = domain(name)
            ctx = D.ctx
            rng = random.Random(9)
            from btquot.arithgroup import are_equivalent

            for _ in range(5):
                v = bt.V0
                for _ in range(rng.randint(0, 3)):
                    v = rng.choice(bt.neighbours(v, ctx.p))
                g = random_gamma(D, rng, 2)
                w = g.act(ctx, v, False)
                h = are_equivalent(v, w, ctx)
                assert h is not None and h.act(ctx, v, False) == w
                e = rng.choice(bt.edges_out(v, ctx.p))
                assert D.lookup_edge(e)[0] == D.lookup_edge(g.act(ctx, e, True))[0]
        # lift uniqueness under random padding
        H = space("p2_N13_1")
        b = H.basis()[0]
        f0 = lift(H, b, 20)
        for seed in (1, 2, 3):
            f1 = lift(H, b, 20, pad="random", seed=seed)
            for m0, m1 in zip(f0.moments, f1.moments):
                for x, y in zip(m0, m1):
                    assert (x - y).is_zero() or (x - y).valuation() >= f0.plan.Nsecond - 3
        # equation pipeline on a planted rational model
        F = dict(zip(PATTERN_F, [2, 12, -6, -17, -108]))
        G = dict(zip(PATTERN_G, [5, 33, -9, -45, 16]))
        R = find_relations(planted_samples(F, G, 53, 30, 40, seed=4, torus=[3, 5, 7, 2]), 53)
        rec = recognize_invariants(R)
        assert rec.ok
        model = gauge_fix(rec, R, -6, -3)
        assert model.F == {"x0^2": 2, "x0*x2": 12, "x1^2": -6, "x2^2": -17, "x3^2": -108}


def test_criterion_10_large_level_excluded(capsys):
    with criterion(10, capsys, "(211,1511,1) not run in CI; genus checked via Ogg only"):
        assert not list(FIXTURE_DIR.glob("p211*"))
        assert "p211_N1511_1" not in FIXTURES
        assert genus_ogg(211, 1511, 1) == 26425
