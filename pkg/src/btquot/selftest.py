"""Quick invariant checks on the bundled fixtures (``btquot selftest``)."""

from __future__ import annotations

import random

from . import bttree as bt
from .evaluate import Evaluator, modularity_defect, random_gamma, random_point
from .fundom import compute_fundamental_domain, genus_ogg
from .harmonic import HarmonicSpace
from .overconvergent import exact_specialization_matches, lift
from .quatalg import FIXTURE_DIR, load_order


def _random_vertex(rng, p, depth=4):
    v = bt.V0
    for _ in range(depth):
        v = rng.choice(bt.neighbours(v, p))
    return v


def run_selftest(log=print, seed: int = 0) -> bool:
    rng = random.Random(seed)
    ok = True

    def check(name, cond):
        nonlocal ok
        ok = ok and bool(cond)
        log(f"{'PASS' if cond else 'FAIL'}  {name}")

    for path in sorted(FIXTURE_DIR.glob("*.json")):
        ctx = load_order(path)
        D = compute_fundamental_domain(ctx)
        lvl = ctx.level_string()
        check(f"{lvl} genus {D.genus()} equals Ogg", D.genus() == genus_ogg(ctx.p, ctx.Nminus, ctx.Nplus))
        H = HarmonicSpace(D, 0)
        B = H.basis()
        check(f"{lvl} weight 2 dimension {len(B)} equals the formula", len(B) == H.expected_dim)
        check(f"{lvl} weight 2 basis satisfies the relations", all(H.defect(c) is None or H.defect(c) == 0 for c in B))
        if B:
            v = _random_vertex(rng, ctx.p)
            check(f"{lvl} vertex sums vanish at {tuple(v)}", all(x == 0 for x in H.vertex_sums(B[0], v)))
        if ctx.p == 2 and B:
            form = lift(H, B[0], 10)
            check(f"{lvl} lift specializes exactly", exact_specialization_matches(form, B[0]))
            ev = Evaluator(form)
            worst = max(modularity_defect(ev, random_point(ctx.p, rng, 40), random_gamma(D, rng), 8) for _ in range(3))
            check(f"{lvl} modularity defect {worst} <= 3 digits", worst <= 3)
    log("selftest " + ("passed" if ok else "FAILED"))
    return ok
