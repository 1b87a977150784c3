"""Equations for genus-4 Shimura curves from p-adic values of their weight-2 forms.

A non-hyperelliptic genus-4 curve is cut out in P^3 by a quadric F and a
cubic G (the cubic only modulo x_i F).  Given a basis f_0..f_3 of weight-2
eigenforms we sample (f_0(z) : ... : f_3(z)) at points of the p-adic upper
half plane, recover F and G as p-adic kernels, read off torus invariants of
their coefficients, recognise them as rationals and fix the remaining gauge.
The result is a candidate model: it is not proved to be correct.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm

from .evaluate import evaluate_many, random_point
from .lattice import lll_gram
from .padic import (PadicNumber, PadicQuadElement, PrecisionError, is_square_padic, quadratic_generator,
                    rational_reconstruct)
from .plinalg import padic_kernel

GUARD = 3
NVARS = 4


class RelationError(RuntimeError):
    """Kernel dimensions or supports are not those of a canonical genus-4 curve."""


# --- monomials -----------------------------------------------------------------


def monomials(degree: int, nvars: int = NVARS):
    """Exponent vectors of the given degree, lexicographically decreasing (x0^d first)."""
    out = []
    for combo in itertools.combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return sorted(set(out), reverse=True)


def monomial_name(e) -> str:
    parts = []
    for i, k in enumerate(e):
        if k == 1:
            parts.append(f"x{i}")
        elif k:
            parts.append(f"x{i}^{k}")
    return "*".join(parts) or "1"


def _mono_value(coords, e):
    out = None
    for x, k in zip(coords, e):
        for _ in range(k):
            out = x if out is None else out * x
    return out


# --- samples -------------------------------------------------------------------


@dataclass
class CanonicalSample:
    """A point of the canonical image, scaled so the smallest-valuation coordinate is 1."""

    z: object
    coords: list

    @classmethod
    def from_values(cls, z, values):
        vals = [v.valuation() for v in values]
        k = min(range(len(values)), key=lambda i: (vals[i], i))
        lead = values[k]
        if lead.valuation() >= min(c.prec for c in _parts(lead)):
            raise PrecisionError("all coordinates vanish to working precision")
        return cls(z, [v / lead for v in values])

    @property
    def prec(self) -> int:
        return min(c.prec for v in self.coords for c in _parts(v))

    def key(self, digits: int):
        return tuple(c.residue(digits) for v in self.coords for c in _parts(v))


def _parts(v):
    if isinstance(v, PadicQuadElement):
        return (v.a, v.b)
    return (v,)


def sample_points(forms, count: int, seed: int = 0, spread: int = 2, max_tries: int | None = None):
    """``count`` canonical samples (f_0(z) : ... : f_3(z)) with pairwise distinct images."""
    rng = random.Random(seed)
    p = forms[0].p
    prec = max(f.plan.Nsecond for f in forms) + 8
    out, seen = [], set()
    tries = 0
    max_tries = max_tries or 4 * count + 20
    while len(out) < count:
        tries += 1
        if tries > max_tries:
            raise PrecisionError(f"only {len(out)} usable samples after {max_tries} points")
        z = random_point(p, rng, prec, spread)
        try:
            s = CanonicalSample.from_values(z, evaluate_many(forms, z))
        except PrecisionError:
            continue
        k = s.key(min(4, s.prec))
        if k in seen:
            continue
        seen.add(k)
        out.append(s)
    return out


# --- relations -------------------------------------------------------------------


@dataclass
class PadicForm:
    """A homogeneous polynomial with p-adic coefficients, indexed by exponent vectors."""

    coeffs: dict
    prec: int

    def support(self):
        return sorted((e for e, c in self.coeffs.items() if not c.is_zero()), reverse=True)

    def __getitem__(self, e):
        return self.coeffs[e]

    def scaled(self, s):
        return PadicForm({e: c * s for e, c in self.coeffs.items()}, self.prec)

    def to_strings(self):
        return {monomial_name(e): c.to_string() for e, c in self.coeffs.items() if not c.is_zero()}


@dataclass
class RelationSet:
    F: PadicForm
    G: PadicForm
    quadric_dim: int
    cubic_dim: int
    reduced_by: int  # the variable j whose x_i x_j^2 columns fix G modulo x_i F
    near_threshold: list = field(default_factory=list)
    prec: int = 0

    def to_json(self):
        return {
            "F": self.F.to_strings(),
            "G": self.G.to_strings(),
            "support_F": [monomial_name(e) for e in self.F.support()],
            "support_G": [monomial_name(e) for e in self.G.support()],
            "quadric_kernel_dim": self.quadric_dim,
            "cubic_kernel_dim": self.cubic_dim,
            "near_threshold": self.near_threshold,
            "precision": self.prec,
        }


def _sample_rows(samples, degree):
    """Integral residue rows (two per sample for points off Qp) and their common precision."""
    mons = monomials(degree)
    rows_pn = []
    for s in samples:
        vals = [_mono_value(s.coords, e) for e in mons]
        nparts = len(_parts(vals[0]))
        for k in range(nparts):
            rows_pn.append([_parts(v)[k] for v in vals])
    N = min(x.prec for r in rows_pn for x in r)
    if any(not x.is_zero() and x.val < 0 for r in rows_pn for x in r):
        raise AssertionError("normalized samples must be integral")
    rows = [[x.residue(N) for x in r] for r in rows_pn]
    return mons, rows, N


def _kernel(rows, p, N, ncol):
    basis, free, prec = padic_kernel(rows, p, N, ncol)
    return basis, prec


def _threshold(vec, prec, guard, label, mons, report):
    """Zero out coefficients at relative valuation >= prec - guard; record near misses."""
    vmin = min(x.val for x in vec if not x.is_zero())
    cut = prec - guard
    out = {}
    for e, x in zip(mons, vec):
        rel = None if x.is_zero() else x.val - vmin
        if rel is None or rel >= cut:
            out[e] = PadicNumber.zero(x.p, prec)
        else:
            out[e] = x
            if rel >= cut - GUARD:
                report.append({"form": label, "monomial": monomial_name(e), "relative_valuation": rel, "threshold": cut})
    return out


def find_relations(samples, p: int, guard: int = GUARD) -> RelationSet:
    """The quadric F and the cubic G (modulo x_i F) through the sampled points."""
    near = []
    m2, rows2, N2 = _sample_rows(samples, 2)
    K2, prec2 = _kernel(rows2, p, N2, len(m2))
    if len(K2) != 1:
        raise RelationError(f"quadric kernel has dimension {len(K2)}, expected 1")
    F = PadicForm(_threshold(K2[0], prec2, guard, "F", m2, near), prec2)

    m3, rows3, N3 = _sample_rows(samples, 3)
    K3, _ = _kernel(rows3, p, N3, len(m3))
    if len(K3) != NVARS + 1:
        raise RelationError(f"cubic kernel has dimension {len(K3)}, expected {NVARS + 1}")
    best = None
    for j in _isolated_square_vars(F):
        cols = [m3.index(tuple(int(i == t) + 2 * int(j == t) for t in range(NVARS))) for i in range(NVARS)]
        extra = []
        for c in cols:
            row = [0] * len(m3)
            row[c] = 1
            extra.append(row)
        K, prec3 = _kernel(rows3 + extra, p, N3, len(m3))
        if len(K) != 1:
            raise RelationError(f"cubic kernel modulo x_i F has dimension {len(K)}, expected 1")
        local = []
        G = PadicForm(_threshold(K[0], prec3, guard, "G", m3, local), prec3)
        cand = (len(G.support()), -j, G, j, local)
        if best is None or cand[:2] < best[:2]:
            best = cand
    if best is None:
        raise RelationError("the quadric has no variable occurring only as a square")
    _, _, G, j, local = best
    return RelationSet(F, G, len(K2), len(K3) - NVARS, j, near + local, min(F.prec, G.prec))


def _isolated_square_vars(F: PadicForm):
    supp = F.support()
    out = []
    for j in range(NVARS):
        sq = tuple(2 * int(t == j) for t in range(NVARS))
        if sq in supp and all(e == sq or e[j] == 0 for e in supp):
            out.append(j)
    return out


# --- invariants --------------------------------------------------------------------

# The support pattern of the model: F in {x0^2, x0x2, x1^2, x2^2, x3^2} and
# G in {x0^3, x0^2x2, x0x1^2, x1^2x2, x2^3}, with coefficients a_0..a_4, b_0..b_4.
PATTERN_F = [(2, 0, 0, 0), (1, 0, 1, 0), (0, 2, 0, 0), (0, 0, 2, 0), (0, 0, 0, 2)]
PATTERN_G = [(3, 0, 0, 0), (2, 0, 1, 0), (1, 2, 0, 0), (0, 2, 1, 0), (0, 0, 3, 0)]

# Six torus invariants as exponents on (a_0..a_4, b_0..b_4).
NAMED_INVARIANTS = {
    "a0*a2^2/b2^2": (1, 0, 2, 0, 0, 0, 0, -2, 0, 0),
    "a1*a2^2/(b2*b3)": (0, 1, 2, 0, 0, 0, 0, -1, -1, 0),
    "a3*a2^2/b3^2": (0, 0, 2, 1, 0, 0, 0, 0, -2, 0),
    "a2^3*b4/b3^3": (0, 0, 3, 0, 0, 0, 0, 0, -3, 1),
    "a2^3*b0/b2^3": (0, 0, 3, 0, 0, 1, 0, -3, 0, 0),
    "a2^3*b1/(b2^2*b3)": (0, 0, 3, 0, 0, 0, 1, -2, -1, 0),
}


def integer_kernel(rows, ncol: int):
    """A Z-basis of {v in Z^ncol : rows v = 0}, by unimodular column operations."""
    cols = [[r[c] for r in rows] + [int(i == c) for i in range(ncol)] for c in range(ncol)]
    nr = len(rows)
    k = 0
    for r in range(nr):
        while True:
            live = [i for i in range(k, ncol) if cols[i][r]]
            if not live:
                break
            i = min(live, key=lambda t: abs(cols[t][r]))
            cols[k], cols[i] = cols[i], cols[k]
            done = True
            for t in range(k + 1, ncol):
                if cols[t][r]:
                    q = cols[t][r] // cols[k][r]
                    cols[t] = [a - q * b for a, b in zip(cols[t], cols[k])]
                    done = done and cols[t][r] == 0
            if done:
                k += 1
                break
    return [c[nr:] for c in cols[k:]]


def lll_reduce(vectors):
    if not vectors:
        return []
    G = [[sum(a * b for a, b in zip(u, v)) for v in vectors] for u in vectors]
    U, _ = lll_gram(G)
    return [[sum(U[i][j] * vectors[j][c] for j in range(len(vectors))) for c in range(len(vectors[0]))]
            for i in range(len(vectors))]


def weight_matrix(support_F, support_G, projective: bool = False):
    """Torus weights of the coefficient variables (rows: x0..x3), optionally with degree rows."""
    variables = list(support_F) + list(support_G)
    rows = [[e[i] for e in variables] for i in range(NVARS)]
    if projective:
        rows.append([1] * len(support_F) + [0] * len(support_G))
        rows.append([0] * len(support_F) + [1] * len(support_G))
    return rows


def invariant_basis(support_F, support_G, projective: bool = False):
    """LLL-reduced exponent vectors of the torus-invariant Laurent monomials in the coefficients."""
    W = weight_matrix(support_F, support_G, projective)
    K = integer_kernel(W, len(W[0]))
    return lll_reduce(K)


def matrix_rank(rows) -> int:
    from .plinalg import rref

    return len(rref(rows)[1]) if rows else 0


def in_span(basis, v) -> bool:
    return matrix_rank(basis + [list(v)]) == matrix_rank(basis)


def pattern_coefficients(R: RelationSet):
    """(a_0..a_4, b_0..b_4) normalized so that a_0 = b_0 = 1."""
    if set(R.F.support()) != set(PATTERN_F) or set(R.G.support()) != set(PATTERN_G):
        raise RelationError("supports differ from the expected pattern; named invariants do not apply")
    a = [R.F[e] for e in PATTERN_F]
    b = [R.G[e] for e in PATTERN_G]
    return [x / a[0] for x in a], [y / b[0] for y in b]


def evaluate_invariant(exps, a, b):
    num = den = None
    for x, k in zip(list(a) + list(b), exps):
        if k > 0:
            num = x**k if num is None else num * x**k
        elif k < 0:
            den = x**-k if den is None else den * x**-k
    if den is None:
        return num
    return den.__rtruediv__(1) if num is None else num / den


@dataclass
class Recognized:
    values: dict  # name -> Fraction or None
    padic: dict  # name -> PadicNumber
    failures: list

    @property
    def ok(self):
        return not self.failures

    def to_json(self):
        return {
            "invariants": {k: (None if v is None else str(v)) for k, v in self.values.items()},
            "padic": {k: v.to_string() for k, v in self.padic.items()},
            "failures": self.failures,
        }


def recognize_invariants(R: RelationSet, invariants=None, guard: int = 10) -> Recognized:
    invariants = NAMED_INVARIANTS if invariants is None else invariants
    a, b = pattern_coefficients(R)
    values, padic, failures = {}, {}, []
    for name, exps in invariants.items():
        x = evaluate_invariant(exps, a, b)
        padic[name] = x
        q = rational_reconstruct(x, guard)
        values[name] = q
        if q is None:
            failures.append({"invariant": name, "relative_precision": x.relprec, "guard": guard})
    return Recognized(values, padic, failures)


# --- gauge -----------------------------------------------------------------------------


class GaugeError(ValueError):
    pass


def _height(coeffs):
    return sum(abs(c) for c in coeffs)


def _primitive(coeffs):
    """(multiplier, integer coefficients) with the smallest positive multiplier making them coprime integers."""
    den = lcm(*(c.denominator for c in coeffs))
    ints = [int(c * den) for c in coeffs]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return Fraction(den, g), [x // g for x in ints]


def _x0_scaling(r, bound: int = 12):
    """The scaling x0 -> x0/k (k = u/v, 1 <= u, v <= bound) of least total height."""
    best = None
    for u in range(1, bound + 1):
        for v in range(1, bound + 1):
            if gcd(u, v) != 1:
                continue
            k = Fraction(u, v)
            sF, F = _primitive([r["a0"] / k**2, r["a1"] / k, r["a3"]])
            sG, G = _primitive([r["b0"] / k**3, r["b1"] / k**2, r["b4"]])
            key = (_height(F) + _height(G), u + v)
            if best is None or key < best[0]:
                best = (key, k, sF, sG)
    return best[1:]


@dataclass
class Model:
    F: dict  # monomial name -> Fraction
    G: dict
    A: int
    B: int
    checks: dict
    conjectural: bool = True

    def to_json(self):
        return {
            "status": "CONJECTURAL",
            "conjectural": True,
            "F": {k: str(v) for k, v in self.F.items()},
            "G": {k: str(v) for k, v in self.G.items()},
            "F_text": poly_text(self.F),
            "G_text": poly_text(self.G),
            "residual": {"A": self.A, "B": self.B},
            "checks": self.checks,
        }


def poly_text(P: dict) -> str:
    out = ""
    for name, c in P.items():
        if c == 0:
            continue
        s = "-" if c < 0 else "+"
        mag = abs(c)
        body = name if mag == 1 else f"{mag}*{name}"
        out += f" {s} {body}" if out else (f"-{body}" if c < 0 else body)
    return out or "0"


def gauge_fix(rec: Recognized, R: RelationSet, A: int, B: int, twist=(0, 0)) -> Model:
    """Rational model in the gauge C = D = 1 with residual square classes A, B.

    The p-adic relations are moved by the torus to the normalization
    a_0 = r_1, a_1 = r_2, a_3 = r_3, b_0 = r_5, b_1 = r_6, b_4 = r_4 (r the
    recognised invariants); there a_2 = b_2 = b_3 equals B and a_4 equals A
    up to squares of Qp, which is checked for the supplied integers.

    ``twist`` = (t1, t3) marks x1, x3 as coordinates whose algebraic
    differential is sqrt(eps) times the p-adic one (eps the non-square unit
    generating Qp(w)); their square classes are then multiplied by eps.
    """
    if not rec.ok:
        raise GaugeError(f"unrecognised invariants: {[f['invariant'] for f in rec.failures]}")
    names = list(NAMED_INVARIANTS)
    v = [rec.values[k] for k in names]
    r = {"a0": v[0], "a1": v[1], "a3": v[2], "b4": v[3], "b0": v[4], "b1": v[5]}
    if any(x == 0 for x in r.values()):
        raise GaugeError("a recognised invariant vanishes")

    # p-adic normalization (lambda_0 = 1): the scalings of F, G and x2.
    a = [R.F[e] for e in PATTERN_F]
    b = [R.G[e] for e in PATTERN_G]
    sF = r["a0"] / a[0]
    lam2 = r["a1"] / (a[1] * sF)
    sG = r["b0"] / b[0]
    checks = {
        "a3": _agree(a[3] * sF * lam2 * lam2, r["a3"]),
        "b1": _agree(b[1] * sG * lam2, r["b1"]),
        "b4": _agree(b[4] * sG * lam2**3, r["b4"]),
    }
    a2 = a[2] * sF
    b2 = b[2] * sG
    b3 = b[3] * sG * lam2
    checks["b2=a2"] = _agree(b2 / a2, 1)
    checks["b3=a2"] = _agree(b3 / a2, 1)
    a4 = a[4] * sF
    eps = quadratic_generator(a4.p)[1]
    checks["A_square_class"] = is_square_padic(a4 * eps ** twist[1] / A)
    checks["B_square_class"] = is_square_padic(a2 * eps ** twist[0] / B)
    checks["twist"] = {"x1": twist[0], "x3": twist[1]}
    checks["A_padic"] = a4.to_string()
    checks["B_padic"] = a2.to_string()
    bad = [k for k, x in checks.items() if x is False]
    if bad:
        raise GaugeError(f"gauge consistency failed: {bad}")

    k, nF, nG = _x0_scaling(r)
    m = _x1_scaling(nF, nG, k)
    F = {
        "x0^2": nF * r["a0"] / k**2,
        "x0*x2": nF * r["a1"] / k,
        "x1^2": nF * B / m**2,
        "x2^2": nF * r["a3"],
        "x3^2": nF * A,
    }
    G = {
        "x0^3": nG * r["b0"] / k**3,
        "x0^2*x2": nG * r["b1"] / k**2,
        "x0*x1^2": nG * B / (k * m**2),
        "x1^2*x2": nG * B / m**2,
        "x2^3": nG * r["b4"],
    }
    checks["scalings"] = {"x0": str(k), "x1": str(m), "F": str(nF), "G": str(nG)}
    return Model(F, G, A, B, checks)


def _x1_scaling(nF, nG, k):
    """Largest integer m with nF/m^2, nG/(k m^2), nG/m^2 integral."""
    best = 1
    for m in range(1, 100):
        vals = [nF / m**2, nG / (k * m**2), nG / m**2]
        if all(x.denominator == 1 for x in vals):
            best = m
    return best


def _agree(x: PadicNumber, q) -> bool:
    d = x - q
    if d.is_zero():
        return True
    return d.val - (x.val if not x.is_zero() else 0) >= min(x.relprec, 10) - GUARD


# --- planted models ------------------------------------------------------------------


def sqrt_unramified(c: PadicNumber) -> PadicQuadElement:
    """A square root in Qp(w) of c in Qp^x of even valuation (odd p): every such c is a square there."""
    from .padic import hensel_sqrt, legendre

    p = c.p
    zero = PadicNumber.zero(p, c.prec)
    if legendre(c.unit, p) == 1:
        return PadicQuadElement(hensel_sqrt(c), zero)
    _, eps = quadratic_generator(p)
    return PadicQuadElement(zero, hensel_sqrt(c / eps))


def planted_samples(F: dict, G: dict, p: int, count: int, prec: int, seed: int = 0, torus=None):
    """Points over Qp(w) of the curve F = G = 0 in the pattern, moved by a diagonal torus element.

    x0, x2 are random integers; x1^2 is solved from G and then x3^2 from F.  Both
    lie in Qp, so they have square roots in Qp(w) whenever their valuations are even.
    ``F``/``G`` map exponent vectors of the pattern to rationals.
    """
    rng = random.Random(seed)
    torus = torus or [Fraction(1)] * NVARS
    out = []
    a = [Fraction(F[e]) for e in PATTERN_F]
    b = [Fraction(G[e]) for e in PATTERN_G]
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > 50 * count:
            raise RuntimeError("could not find enough points on the planted curve")
        x0 = Fraction(rng.randint(1, 10**6))
        x2 = Fraction(rng.randint(1, 10**6))
        den = b[2] * x0 + b[3] * x2
        if den == 0:
            continue
        x1sq = -(b[0] * x0**3 + b[1] * x0**2 * x2 + b[4] * x2**3) / den
        x3sq = -(a[0] * x0**2 + a[1] * x0 * x2 + a[3] * x2**2 + a[2] * x1sq) / a[4]
        if x1sq == 0 or x3sq == 0:
            continue
        c1 = PadicNumber.from_rational(p, x1sq, prec + 4)
        c3 = PadicNumber.from_rational(p, x3sq, prec + 4)
        if c1.val % 2 or c3.val % 2:
            continue
        x1, x3 = sqrt_unramified(c1), sqrt_unramified(c3)
        X0 = PadicQuadElement.from_ints(p, x0 / torus[0], 0, prec)
        X2 = PadicQuadElement.from_ints(p, x2 / torus[2], 0, prec)
        coords = [X0, x1 / torus[1], X2, x3 / torus[3]]
        try:
            out.append(CanonicalSample.from_values(None, coords))
        except PrecisionError:
            continue
    return out


def twisted_pattern(F: dict, G: dict, torus):
    """Coefficients of F(t x), G(t x) for a diagonal torus element t."""
    def tw(P):
        out = {}
        for e, c in P.items():
            s = Fraction(c)
            for t, k in zip(torus, e):
                s *= Fraction(t) ** k
            out[e] = s
        return out

    return tw(F), tw(G)


# --- the pipeline ------------------------------------------------------------------------


def atkin_lehner_signs(space, vectors):
    """{q: [sign of w_q on each eigenvector]} for the primes q dividing p N-."""
    from .quatalg import prime_factors

    out = {}
    for q in sorted(set(prime_factors(space.D.ctx.Nminus)) | {space.p}):
        T = space.operator_in_basis(space.atkin_lehner(q))
        signs = []
        for v in vectors:
            k = next(i for i, x in enumerate(v) if x)
            Tv = sum(T[k][t] * v[t] for t in range(len(v)))
            lam = Tv / v[k]
            if lam not in (1, -1):
                raise RelationError(f"w_{q} does not act by a sign on an eigenvector")
            signs.append(int(lam))
        out[q] = signs
    return out


def coordinate_orders(signs, p: int):
    """Candidate orders (x0, x1, x2, x3) of the eigenforms from Atkin-Lehner signs.

    On the curve w_p acts by minus the sign it has on cocycles.  The quadric and
    cubic have the expected shape when x0, x2 are fixed by every involution, x1 is
    negated by all of them and x3 only by w_q for q != p.  The pair x0, x2 is not
    separated by signs; both orders are returned.
    """
    qs = [q for q in signs if q != p]
    if len(qs) != 1:
        raise RelationError("coordinate labels are implemented for N- prime")
    q = qs[0]
    curve = [(signs[q][i], -signs[p][i]) for i in range(len(signs[p]))]
    fixed = [i for i, s in enumerate(curve) if s == (1, 1)]
    x1 = [i for i, s in enumerate(curve) if s == (-1, -1)]
    x3 = [i for i, s in enumerate(curve) if s == (-1, 1)]
    if len(fixed) != 2 or len(x1) != 1 or len(x3) != 1:
        raise RelationError(f"Atkin-Lehner signs {curve} do not fit the model shape")
    a, b = fixed
    twist = tuple(int(signs[p][i] == 1) for i in (x1[0], x3[0]))
    return [[a, x1[0], b, x3[0]], [b, x1[0], a, x3[0]]], twist


def relabel(samples, order):
    return [CanonicalSample.from_values(s.z, [s.coords[i] for i in order]) for s in samples]


@dataclass
class EquationResult:
    model: Model | None
    relations: RelationSet
    recognized: Recognized | None
    order: list
    eigenvalues: list
    signs: dict
    plan: object
    samples: int
    invariant_basis: list
    timings: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "status": "CONJECTURAL",
            "conjectural": True,
            "coordinates": [
                {"name": f"x{i}", "hecke": {str(k): str(v) for k, v in self.eigenvalues[j].items()},
                 "atkin_lehner_on_cocycles": {str(q): s[j] for q, s in self.signs.items()}}
                for i, j in enumerate(self.order)
            ],
            "relations": self.relations.to_json(),
            "invariant_basis": self.invariant_basis,
            "recognized": None if self.recognized is None else self.recognized.to_json(),
            "model": None if self.model is None else self.model.to_json(),
            "samples": self.samples,
            "precision": self.plan.to_json(),
        }


def equations(D, digits: int, samples: int, A: int | None = None, B: int | None = None,
              seed: int = 0, hecke_primes=(3, 5, 7, 11, 13)) -> EquationResult:
    """The whole pipeline on a genus-4 quotient: eigenforms, lifts, samples, relations, model."""
    import time

    from .harmonic import HarmonicSpace, eigen_decomposition
    from .overconvergent import lift, plan

    t0 = time.perf_counter()
    H = HarmonicSpace(D, 0)
    if len(H.basis()) != NVARS:
        raise RelationError(f"the curve has genus {len(H.basis())}, the model needs genus 4")
    primes = [q for q in hecke_primes if (D.p * D.ctx.Nminus * D.ctx.Nplus) % q]
    vecs, evals, ok = eigen_decomposition(H, primes)
    if not ok:
        raise RelationError("the Hecke algebra does not split the space into rational lines")
    signs = atkin_lehner_signs(H, vecs)
    orders, twist = coordinate_orders(signs, D.p)
    forms = [lift(H, H.combination(v), digits) for v in vecs]
    t1 = time.perf_counter()
    S = sample_points(forms, samples, seed)
    t2 = time.perf_counter()
    found = None
    for order in orders:
        R = find_relations(relabel(S, order), D.p)
        if set(R.F.support()) == set(PATTERN_F) and set(R.G.support()) == set(PATTERN_G):
            found = (order, R)
            break
    if found is None:
        order, R = orders[0], find_relations(relabel(S, orders[0]), D.p)
        rec = model = None
    else:
        order, R = found
        rec = recognize_invariants(R)
        model = gauge_fix(rec, R, A, B, twist) if (A is not None and B is not None and rec.ok) else None
    basis = invariant_basis(R.F.support(), R.G.support())
    t3 = time.perf_counter()
    return EquationResult(model, R, rec, order, evals, signs, forms[0].plan, samples, basis,
                          {"lift": t1 - t0, "sample": t2 - t1, "relations": t3 - t2})
