"""Evaluation of rigid analytic forms f(z) = integral of dmu(t) / (z - t).

The boundary P^1(Qp) is covered by the p+1 balls g0 alpha_a Zp and
g0 (0, 1; p, 0) Zp, where g0 Zp is the closest disc of Qp to z.  On a ball
g Zp the integrand is h_g(s) = det(g)^(-n/2) (cs + d)^(n+1) / ((cz - a)s + (dz - b))
paired with Phi(g); if gamma g e0 = b_r then Phi(g)(h_g) = Phi(b_r)(h_M) with
M = gamma^-1 b_r, so only the stored moments of the representatives are used.
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import comb

from . import bttree as bt
from .arithgroup import GammaElement, iota4
from .padic import PadicNumber, PadicQuadElement, PrecisionError

def _w0(p):
    return (0, 1, p, 0)


def _pn(p, x, prec):
    return PadicNumber.from_rational(p, x, prec)


def closest_disc(z: PadicQuadElement):
    """Integer matrix g0 = (p^r, x0; 0, 1) (up to a scalar) with g0^-1 z reducing to v0."""
    x, y = z.a, z.b
    p = x.p
    if y.is_zero():
        raise PrecisionError("point is indistinguishable from P^1(Qp)")
    r = y.valuation()
    if x.is_zero() or x.valuation() >= r:
        x0 = Fraction(0)
    else:
        x0 = Fraction(x.unit % p ** (r - x.val)) * Fraction(p) ** x.val
    s = max(0, -r, -(x0.numerator and _val(x0, p) or 0))
    scale = Fraction(p) ** s
    g = (Fraction(p) ** r * scale, x0 * scale, Fraction(0), scale)
    if any(c.denominator != 1 for c in g):
        raise AssertionError("closest disc matrix not integral")
    return tuple(int(c) for c in g)


def _val(x: Fraction, p):
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def depth_shift(z: PadicQuadElement) -> int:
    """Digits lost to cancellation near the closest disc: |v(y)| plus a negative v(x)."""
    r = z.b.valuation()
    vx = z.a.valuation() if not z.a.is_zero() else r
    return abs(r) + max(0, -vx)


def covering(z: PadicQuadElement):
    """The p+1 integer matrices g whose balls g Zp partition P^1(Qp), for the point z."""
    p = z.p
    g0 = closest_disc(z)
    return [bt.mat_mul(g0, (p, a, 0, 1)) for a in range(p)] + [bt.mat_mul(g0, _w0(p))]


def _kernel_data(M, z: PadicQuadElement, n: int, prec: int):
    p = z.p
    a, b, c, d = (_pn(p, int(v), prec) for v in M)
    P = z * c - a
    Q = z * d - b
    if Q.valuation() >= prec:
        raise PrecisionError("kernel denominator vanishes to working precision")
    invQ = PadicQuadElement(_pn(p, 1, prec), PadicNumber.zero(p, prec)) / Q
    u = -(P * invQ)
    num = [c ** j * d ** (n + 1 - j) * comb(n + 1, j) for j in range(n + 2)]
    scale = (a * d - b * c) ** (n // 2) if n else None
    return invQ, u, num, scale


def kernel_series(M, z: PadicQuadElement, n: int, nm: int, prec: int):
    """Coefficients in s of det(M)^(-n/2) (c s + d)^(n+1) / ((cz - a)s + (dz - b)), s^0..s^(nm-1)."""
    invQ, u, num, scale = _kernel_data(M, z, n, prec)
    geo = [invQ]
    for _ in range(1, nm):
        geo.append(geo[-1] * u)
    out = []
    for t in range(nm):
        acc = None
        for j in range(min(t, n + 1) + 1):
            term = geo[t - j] * num[j]
            acc = term if acc is None else acc + term
        out.append(acc)
    if scale is not None:
        out = [x / scale for x in out]
    return out


def pair_kernel(M, z: PadicQuadElement, n: int, moments, prec: int):
    """sum_t kernel_series(...)[t] * moments[t], by a Horner pass over the moments."""
    invQ, u, num, scale = _kernel_data(M, z, n, prec)
    # S_j = sum_{t >= j} u^(t-j) moments[t]
    S = None
    tails = []
    for mu in reversed(moments):
        S = PadicQuadElement(mu, PadicNumber.zero(z.p, mu.prec)) if S is None else S * u + mu
        tails.append(S)
    tails.reverse()
    acc = None
    for j in range(min(n + 2, len(moments))):
        term = tails[j] * num[j]
        acc = term if acc is None else acc + term
    acc = acc * invQ
    return acc / scale if scale is not None else acc


class Evaluator:
    """f(z) for a lifted form (moments on the 2E representatives)."""

    def __init__(self, form):
        self.form = form
        self.D = form.D
        self.ctx = form.D.ctx
        self.p = form.p
        self.n = form.n
        self.nm = len(form.moments[0])

    def contributions(self, z: PadicQuadElement, prec: int):
        p, ctx, D = self.p, self.ctx, self.D
        out = []
        for g in covering(z):
            e = bt.normalize_edge(g, p, ctx.prec)
            r, gam = D.lookup_edge(e)
            M = bt.mat_mul(iota4(ctx, ctx.conj(gam.x)), D.reps[r], p**ctx.prec)
            out.append(pair_kernel(M, z, self.n, self.form.moments[r], prec))
        return out

    def __call__(self, z: PadicQuadElement, prec: int | None = None):
        prec = max(prec or 0, self.form.plan.Nsecond + 4)
        work = min(prec + 2 * depth_shift(z) + self.n + 4, self.ctx.prec)
        total = None
        for x in self.contributions(z, work):
            total = x if total is None else total + x
        return total


def evaluate(form, z, prec: int | None = None):
    return Evaluator(form)(z, prec)


def evaluate_many(forms, z: PadicQuadElement, prec: int | None = None):
    """[f(z) for f in forms]; the forms must share a domain, so ball lookups are done once."""
    ev = Evaluator(forms[0])
    prec = max(prec or 0, max(f.plan.Nsecond for f in forms) + 4)
    work = min(prec + 2 * depth_shift(z) + ev.n + 4, ev.ctx.prec)
    p, ctx, D = ev.p, ev.ctx, ev.D
    totals = [None] * len(forms)
    for g in covering(z):
        r, gam = D.lookup_edge(bt.normalize_edge(g, p, ctx.prec))
        M = bt.mat_mul(iota4(ctx, ctx.conj(gam.x)), D.reps[r], p**ctx.prec)
        for i, f in enumerate(forms):
            x = pair_kernel(M, z, f.n, f.moments[r], work)
            totals[i] = x if totals[i] is None else totals[i] + x
    return totals


# --- group elements as p-adic matrices -----------------------------------------------


def gamma_matrix(ctx, g: GammaElement, prec: int):
    """(a, b, c, d) of iota(x)/p^m as PadicNumbers."""
    p = ctx.p
    return tuple(PadicNumber.from_int_mod(p, v, min(prec + g.m, ctx.prec), -g.m) for v in iota4(ctx, g.x))


def mobius(m, z: PadicQuadElement):
    a, b, c, d = m
    return (z * a + b) / (z * c + d)


def random_gamma(D, rng: random.Random, length: int = 3) -> GammaElement:
    """A random word in the boundary pairings, their inverses and the vertex stabilizers."""
    ctx = D.ctx
    gens = [g for _, _, g in D.pairings]
    for st in D.vertex_stabilizers.values():
        gens += st[1:]
    gens += [g.inverse(ctx) for g in gens]
    if not gens:
        return GammaElement.identity(ctx)
    out = GammaElement.identity(ctx)
    for _ in range(length):
        out = out.compose(ctx, rng.choice(gens))
    return out


def random_point(p: int, rng: random.Random, prec: int, spread: int = 2) -> PadicQuadElement:
    """x0 + x1 w with small rational coordinates (x1 != 0)."""
    x0 = Fraction(rng.randint(-p**2, p**2), p ** rng.randint(0, spread))
    x1 = Fraction(rng.choice([-1, 1]) * rng.randint(1, p**2), 1) * Fraction(p) ** rng.randint(-spread, spread)
    return PadicQuadElement.from_ints(p, x0, x1, prec)


def agreement_digits(x: PadicQuadElement, y: PadicQuadElement) -> int:
    """Relative agreement of two nonzero values, in p-adic digits."""
    d = x - y
    base = y.valuation()
    dv = min(_qval(d.a), _qval(d.b))
    return dv - base


def _qval(x: PadicNumber):
    return x.prec if x.is_zero() else x.val


def modularity_defect(ev: Evaluator, z, g: GammaElement, digits: int) -> int:
    """digits - agreement of f(gz) with (cz + d)^(n+2) f(z); <= 0 means full agreement."""
    prec = digits + 6
    m = gamma_matrix(ev.ctx, g, prec + 2 * depth_shift(z) + 8)
    gz = mobius(m, z)
    lhs = ev(gz, prec)
    a, b, c, d = m
    aut = (z * c + d)
    rhs = ev(z, prec)
    for _ in range(ev.n + 2):
        rhs = rhs * aut
    return digits - agreement_digits(lhs, rhs)


# --- Riemann sums (weight 2 oracle) ------------------------------------------------------


def riemann_sum(cocycle, z: PadicQuadElement, depth: int, prec: int):
    """sum over the balls B at the given depth of c(B) / (z - centre(B)), weight 2 only."""
    space = cocycle.space
    if space.n:
        raise ValueError("the Riemann-sum oracle is for weight 2")
    p = z.p
    balls = covering(z)
    for _ in range(depth - 1):
        balls = [bt.mat_mul(g, (p, a, 0, 1)) for g in balls for a in range(p)]
    total = None
    ctx = space.ctx
    for g in balls:
        e = bt.normalize_edge(g, p, ctx.prec)
        mu = cocycle(e)[0]
        if mu == 0:
            continue
        a, b, c, d = g
        u = 0 if d else 1
        centre = Fraction(a * u + b, c * u + d)
        term = PadicQuadElement.from_ints(p, Fraction(mu), 0, prec) / (z - PadicQuadElement.from_ints(p, centre, 0, prec))
        total = term if total is None else total + term
    return total
