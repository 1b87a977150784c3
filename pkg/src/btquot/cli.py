"""The ``btquot`` command line.

Exit codes: 0 success, 2 bad configuration or fixture, 3 precision failure,
4 internal consistency failure.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__

EXIT_CONFIG = 2
EXIT_PRECISION = 3
EXIT_INTERNAL = 4


class ConfigError(Exception):
    pass


# --- helpers ----------------------------------------------------------------------------


def resolve_fixture(name: str) -> Path:
    """A fixture path; unknown paths fall back to the bundled fixture with the same file name."""
    from .quatalg import FixtureError, bundled_fixture

    path = Path(name)
    if path.exists():
        return path
    try:
        return bundled_fixture(path.name)
    except FixtureError:
        raise ConfigError(f"fixture {name!r} not found (neither on disk nor bundled)") from None


def load_fixture(name: str):
    from .quatalg import load_order

    return load_order(resolve_fixture(name))


def header(ctx, args, precision=None, conjectural=False):
    return {
        "tool": "btquot",
        "version": __version__,
        "command": args.command,
        "fixture": Path(ctx.source).name,
        "fixture_sha256": ctx.digest,
        "level": [ctx.p, ctx.Nminus, ctx.Nplus],
        "precision": {"splitting": ctx.prec, **(precision or {})},
        "seed": args.seed,
        "threads": args.threads,
        "conjectural": conjectural,
    }


def write_json(path, data):
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _frac(x):
    return str(Fraction(x))


def _val_str(x):
    return x.to_string() if hasattr(x, "to_string") else _frac(x)


def _domain(ctx):
    from .fundom import compute_fundamental_domain

    return compute_fundamental_domain(ctx)


# --- commands ---------------------------------------------------------------------------


def cmd_order_validate(args):
    from .quatalg import order_to_dict

    ctx = load_fixture(args.file)
    print(f"order {ctx.level_string()} valid: discriminant {ctx.Nminus}, level {ctx.Nplus}, split at {ctx.p} to {ctx.prec} digits")
    if args.json:
        write_json(args.json, {**header(ctx, args), "order": order_to_dict(ctx, include_splitting=False)})
    return 0


def domain_json(D):
    ctx = D.ctx
    return {
        "vertices": [list(v) for v in D.vertices],
        "edges": [list(e) for e in D.accepted],
        "representatives": [list(e) for e in D.reps],
        "pairings": [{"from": list(u), "to": list(v), "gamma": {"x": list(g.x), "m": g.m}} for u, v, g in D.pairings],
        "stabilizers": [{"vertex": list(v), "generators": [{"x": list(g.x), "m": g.m} for g in st[1:]], "order": len(st)}
                        for v, st in D.vertex_stabilizers.items()],
        "quotient_edges": [list(e) for e in D.quotient_edges()],
        "V": D.V,
        "E": D.E,
        "genus": D.genus(),
        "level": ctx.level_string(),
    }


def cmd_fundom(args):
    from .fundom import export_dot, genus_ogg, quotient_graph

    ctx = load_fixture(args.fixture)
    D = _domain(ctx)
    ogg = genus_ogg(ctx.p, ctx.Nminus, ctx.Nplus)
    print(f"{ctx.level_string()}: {D.V} vertices, {D.E} edges, genus {D.genus()} (Ogg {ogg})")
    if D.genus() != ogg:
        print("genus disagrees with Ogg's formula", file=sys.stderr)
        return EXIT_INTERNAL
    if args.dot:
        Path(args.dot).write_text(export_dot(quotient_graph(D)))
    if args.json:
        write_json(args.json, {**header(ctx, args), "domain": domain_json(D), "ogg_genus": ogg})
    return 0


def _weight(args):
    if args.weight < 2 or args.weight % 2:
        raise ConfigError("the weight must be an even integer >= 2")
    return args.weight - 2


def _space(ctx, n, digits=None):
    from .harmonic import HarmonicSpace

    D = _domain(ctx)
    return HarmonicSpace(D, n, None if n == 0 else min(ctx.prec, max(digits or 0, 40)))


def cmd_forms(args):
    from .harmonic import eigen_decomposition

    ctx = load_fixture(args.fixture)
    n = _weight(args)
    H = _space(ctx, n, args.digits)
    B = H.basis()
    primes = [int(x) for x in args.hecke.split(",")] if args.hecke else []
    out = {**header(ctx, args, {"harmonic": H.prec if not H.exact else "exact"}),
           "weight": args.weight, "dimension": len(B), "expected_dimension": H.expected_dim,
           "basis": [[[_val_str(x) for x in v] for v in b.values] for b in B]}
    print(f"{ctx.level_string()} weight {args.weight}: dimension {len(B)} (formula {H.expected_dim})")
    if primes:
        if not H.exact:
            raise ConfigError("Hecke matrices are computed in weight 2")
        out["hecke"] = {str(l): [[_frac(x) for x in r] for r in H.operator_in_basis(H.hecke_operator(l))] for l in primes}
        vecs, evals, ok = eigen_decomposition(H, primes)
        out["eigenforms"] = [{"coordinates": [_frac(x) for x in v], "eigenvalues": {str(k): _frac(x) for k, x in e.items()}}
                             for v, e in zip(vecs, evals)]
        out["eigen_status"] = "split over Q" if ok else "not split into rational lines"
        for e in evals:
            print("  " + ", ".join(f"a{k}={x}" for k, x in e.items()))
    if args.json:
        write_json(args.json, out)
    return 0


def _eigenform(H, idx, primes=(3, 5, 7, 11, 13, 17, 19)):
    from .harmonic import eigen_decomposition

    if H.exact:
        ctx = H.ctx
        usable = [q for q in primes if (ctx.p * ctx.Nminus * ctx.Nplus) % q]
        vecs, _, _ = eigen_decomposition(H, usable)
        if vecs:
            if not 0 <= idx < len(vecs):
                raise ConfigError(f"eigenform index {idx} out of range 0..{len(vecs) - 1}")
            return H.combination(vecs[idx])
    B = H.basis()
    if not 0 <= idx < len(B):
        raise ConfigError(f"eigenform index {idx} out of range 0..{len(B) - 1}")
    return B[idx]


def cmd_lift(args):
    from .overconvergent import exact_specialization_matches, lift

    ctx = load_fixture(args.fixture)
    n = _weight(args)
    M = args.moment_digits
    H = _space(ctx, n, max(args.digits, M or 0) + 10)
    c = _eigenform(H, args.eigenform)
    form = lift(H, c, args.digits, M=M, seed=args.seed)
    ok = exact_specialization_matches(form, c)
    print(f"lift to {args.digits} digits: {form.plan.Nprime} moments, residual valuation {form.residual}, specialization {'exact' if ok else 'MISMATCH'}")
    if args.json:
        write_json(args.json, {**header(ctx, args, form.plan.to_json()), "fixture_path": str(resolve_fixture(args.fixture)),
                               "eigenform": args.eigenform, **form.to_json()})
    return 0 if ok else EXIT_INTERNAL


def cmd_eval(args):
    from .evaluate import Evaluator
    from .harmonic import HarmonicSpace
    from .overconvergent import OvercForm
    from .padic import parse_point
    from .quatalg import load_order

    try:
        data = json.loads(Path(args.moments).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read moments: {exc}") from None
    ctx = load_order(resolve_fixture(data.get("fixture_path") or data["fixture"]))
    if ctx.digest != data["fixture_sha256"]:
        raise ConfigError("fixture hash differs from the one recorded with the moments")
    n = data["weight"] - 2
    D = _domain(ctx)
    H = HarmonicSpace(D, n, None if n == 0 else min(ctx.prec, data["plan"]["N_second"] + 10))
    try:
        form = OvercForm.from_json(H, data)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    digits = args.digits or form.plan.N
    try:
        z = parse_point(args.point, ctx.p, digits + 20)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    val = Evaluator(form)(z, digits)
    print(val.to_string())
    if args.json:
        write_json(args.json, {**header(ctx, args, {"digits": digits}), "point": args.point, "value": val.to_string()})
    return 0


def _load_residuals(path):
    if path is None:
        return None, None
    try:
        import tomllib
    except ModuleNotFoundError:  # Python < 3.11
        import tomli as tomllib
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read residuals: {exc}") from None
    sect = data.get("residuals", data)
    try:
        return int(sect["A"]), int(sect["B"])
    except (KeyError, TypeError, ValueError):
        raise ConfigError("residuals file needs integer entries A and B") from None


def cmd_equations(args):
    from .shimeq import equations

    ctx = load_fixture(args.fixture)
    A, B = _load_residuals(args.residuals)
    D = _domain(ctx)
    res = equations(D, args.digits, args.samples, A, B, seed=args.seed)
    print(f"status: CONJECTURAL   coordinates x0..x3 = eigenforms {res.order}")
    print("F support:", ", ".join(res.relations.to_json()["support_F"]))
    print("G support:", ", ".join(res.relations.to_json()["support_G"]))
    if res.recognized is not None:
        for k, v in res.recognized.values.items():
            print(f"  {k:>20} = {v if v is not None else 'NOT RECOGNISED'}")
    if res.model is not None:
        print("F =", res.model.to_json()["F_text"])
        print("G =", res.model.to_json()["G_text"])
    if args.json:
        write_json(args.json, {**header(ctx, args, res.plan.to_json(), conjectural=True), **res.to_json()})
    return 0


def cmd_selftest(args):
    from .selftest import run_selftest

    return 0 if run_selftest(print) else EXIT_INTERNAL


# --- entry point ----------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="accepted for interface compatibility; work is sequential")
    common.add_argument("--json", help="write a JSON artifact here ('-' for stdout)")

    ap = argparse.ArgumentParser(prog="btquot", description="Quaternionic groups on the Bruhat-Tits tree.")
    ap.add_argument("--version", action="version", version=f"btquot {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    order = sub.add_parser("order", help="order fixtures")
    osub = order.add_subparsers(dest="action", required=True)
    val = osub.add_parser("validate", parents=[common], help="re-validate an order fixture")
    val.add_argument("file")
    val.set_defaults(func=cmd_order_validate)

    fd = sub.add_parser("fundom", parents=[common], help="fundamental domain and quotient graph")
    fd.add_argument("--fixture", required=True)
    fd.add_argument("--dot")
    fd.set_defaults(func=cmd_fundom)

    fo = sub.add_parser("forms", parents=[common], help="harmonic cocycles and Hecke eigen-systems")
    fo.add_argument("--fixture", required=True)
    fo.add_argument("--weight", type=int, default=2)
    fo.add_argument("--hecke")
    fo.add_argument("--digits", type=int, default=40)
    fo.set_defaults(func=cmd_forms)

    li = sub.add_parser("lift", parents=[common], help="overconvergent lift of an eigenform")
    li.add_argument("--fixture", required=True)
    li.add_argument("--weight", type=int, default=2)
    li.add_argument("--eigenform", type=int, default=0)
    li.add_argument("--digits", type=int, default=20)
    li.add_argument("--moment-digits", type=int,
                    help="M in N'' = M + floor(log_p N'); defaults to --digits, raise it for deep evaluation points")
    li.set_defaults(func=cmd_lift)

    ev = sub.add_parser("eval", parents=[common], help="evaluate a lifted form at a point")
    ev.add_argument("--moments", required=True)
    ev.add_argument("--point", required=True)
    ev.add_argument("--digits", type=int)
    ev.set_defaults(func=cmd_eval)

    eq = sub.add_parser("equations", parents=[common], help="canonical-model equations (genus 4)")
    eq.add_argument("--fixture", required=True)
    eq.add_argument("--digits", type=int, default=30)
    eq.add_argument("--samples", type=int, default=30)
    eq.add_argument("--residuals")
    eq.set_defaults(func=cmd_equations)

    st = sub.add_parser("selftest", parents=[common], help="quick consistency checks on the bundled fixtures")
    st.set_defaults(func=cmd_selftest)
    return ap


def _check_positive(args):
    for name in ("digits", "samples", "threads"):
        v = getattr(args, name, None)
        if v is not None and v <= 0:
            raise ConfigError(f"--{name} must be positive")


def main(argv=None) -> int:
    from .padic import PrecisionError
    from .quatalg import FixtureError
    from .shimeq import GaugeError

    args = build_parser().parse_args(argv)
    random.seed(args.seed)
    try:
        _check_positive(args)
        return args.func(args)
    except (ConfigError, FixtureError, GaugeError) as exc:
        print(f"btquot: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PrecisionError as exc:
        print(f"btquot: precision error: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except Exception as exc:  # noqa: BLE001 - every other failure is an internal inconsistency
        print(f"btquot: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
