"""Overconvergent lifts of harmonic cocycles, stored as moments.

A lift is a map Phi from the 2E ordered edge representatives b_j to
distributions on Zp, recorded by the moments Phi(b_j)(s^i), i < N'.  With
J(g, s) = cs + d it is normalised by

    Phi(g)(h) = det(g)^(n/2) * integral over g Zp of h(g^-1 t) J(g^-1, t)^n dmu(t),

which is invariant under scalars, left Gamma-invariant, and satisfies
Phi(g sigma)(h) = Phi(g)(tau * h) for sigma in Qp^x Gamma0(pZp), tau = sigma^-1,
(tau * h)(s) = det(tau)^(-n/2) J(tau, s)^n h(tau s).  Splitting Zp into the
balls a + pZp gives

    Up Phi(g)(h) = sum_a Phi(g alpha_a)(h(a + p s)),   alpha_a = (p, a; 0, 1),

and the lift of an eigenform is the fixed point of p^(-n/2) Up whose first
n+1 moments are the cocycle.  Internally moments are integers modulo p^W
carrying a common factor p^(-e).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import bttree as bt
from .arithgroup import iota4
from .fundom import FundamentalDomain
from .harmonic import HarmonicCocycle, HarmonicSpace
from .padic import PadicNumber, PrecisionError, inv_mod, valuation

GUARD = 3


# --- precision plan ----------------------------------------------------------------


@dataclass(frozen=True)
class PrecisionPlan:
    p: int
    N: int  # target digits
    Nprime: int  # number of moments
    Nsecond: int  # working precision of the moments
    M: int

    def to_json(self):
        return {"N": self.N, "N_prime": self.Nprime, "N_second": self.Nsecond, "M": self.M}


def _ord(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _floor_log(x, p):
    k = 0
    while p ** (k + 1) <= x:
        k += 1
    return k


def plan(N: int, p: int, M: int | None = None) -> PrecisionPlan:
    """N' = max{m >= 1 : m - ord_p(m) < N} (at least 1); N'' = M + floor(log_p N')."""
    if N < 1:
        raise ValueError("target digits must be positive")
    best = 1
    m = 1
    # m - ord_p(m) >= m - log_p(m), so the scan can stop once that exceeds N
    while m - _floor_log(m, p) < N + 1:
        if m - _ord(m, p) < N:
            best = m
        m += 1
    M = N if M is None else M
    return PrecisionPlan(p, N, best, M + _floor_log(best, p), M)


# --- series kernels ----------------------------------------------------------------


def transform_rows(A, B, C, D, n, nm, mod):
    """rows[i][t] = coefficient of s^t in (A s + B)^i (C s + D)^(n - i), for i, t < nm.

    D must be a unit and C divisible by p, so the negative powers are power
    series in s with integral coefficients.
    """
    Dinv = inv_mod(D, mod)
    S = [1] + [0] * (nm - 1)
    for _ in range(n):
        S = _mul_linear(S, C, D, mod)
    rows = [S]
    for _ in range(1, nm):
        S = _div_linear(_mul_linear(S, A, B, mod), C, Dinv, mod)
        rows.append(S)
    return rows


def _mul_linear(S, a, b, mod):
    out = [b * S[0] % mod]
    for t in range(1, len(S)):
        out.append((b * S[t] + a * S[t - 1]) % mod)
    return out


def _div_linear(S, c, dinv, mod):
    out = []
    prev = 0
    for x in S:
        prev = (x - c * prev) * dinv % mod
        out.append(prev)
    return out


def _tau_from(ctx, b_r, gx, g, W):
    """adj of sigma = b_r^-1 gamma g, rescaled into Gamma0(pZp) up to a unit; entries mod p^W."""
    p = ctx.p
    mod = p**ctx.prec
    s = bt.mat_mul(bt.mat_mul(bt.adjugate(b_r), iota4(ctx, gx), mod), g, mod)
    v = min(bt.vp(x, p) for x in s)
    if ctx.prec - v < W:
        raise PrecisionError(f"splitting precision {ctx.prec} too low for moment precision {W}")
    a, b, c, d = (x // p**v for x in s)
    if d % p == 0 or c % p:
        raise PrecisionError("sigma is not in Gamma0(pZp); the lookup or precision is faulty")
    m = p**W
    return (d % m, -b % m, -c % m, a % m)


def _det_factor(tau, n, mod, p):
    A, B, C, D = tau
    return inv_mod(pow((A * D - B * C) % mod, n // 2, mod), mod)


# --- the lift ------------------------------------------------------------------------


@dataclass
class OvercForm:
    """Moments Phi(b_j)(s^i), i < N', for every ordered representative b_j."""

    space: HarmonicSpace
    plan: PrecisionPlan
    moments: list  # 2E lists of PadicNumber at precision N''
    residual: int | None = None  # valuation of the final Up residual
    iterations: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def p(self):
        return self.space.p

    @property
    def n(self):
        return self.space.n

    @property
    def D(self):
        return self.space.D

    def specialization(self) -> HarmonicCocycle:
        phi = [m[: self.n + 1] for m in self.moments]
        return self.space.from_automorphic(phi)

    def to_json(self):
        return {
            "p": self.p,
            "weight": self.n + 2,
            "plan": self.plan.to_json(),
            "reps": [list(b) for b in self.D.reps],
            "moments": [[x.to_string() for x in m] for m in self.moments],
            "residual_valuation": self.residual,
            "iterations": self.iterations,
        }

    @classmethod
    def from_json(cls, space: HarmonicSpace, data: dict) -> "OvercForm":
        if data["p"] != space.p or data["weight"] != space.n + 2:
            raise ValueError("moment file does not match the harmonic space")
        if [list(b) for b in space.D.reps] != [list(b) for b in data["reps"]]:
            raise ValueError("edge representatives differ from the recomputed domain")
        pj = data["plan"]
        pl = PrecisionPlan(space.p, pj["N"], pj["N_prime"], pj["N_second"], pj["M"])
        moments = [[PadicNumber.from_string(x) for x in m] for m in data["moments"]]
        return cls(space, pl, moments, data.get("residual_valuation"), data.get("iterations", 0))


class MomentEngine:
    """Precomputed Up and stabilizer matrices for one (space, plan)."""

    def __init__(self, space: HarmonicSpace, pl: PrecisionPlan):
        self.space = space
        self.plan = pl
        self.D: FundamentalDomain = space.D
        self.ctx = space.ctx
        self.p = p = space.p
        self.n = n = space.n
        self.h = n // 2
        self.nm = max(pl.Nprime, n + 1)
        self.R = len(self.D.reps)
        self.e = None
        self.W = None
        self._up = None

    def configure(self, e: int):
        self.e = e
        self.W = self.plan.Nsecond + e + self.h + GUARD
        self.mod = self.p**self.W
        self._up = None

    # matrices ------------------------------------------------------------------

    def up_matrix(self):
        """Dense integer matrix of the unnormalised Up on the moment vector."""
        if self._up is not None:
            return self._up
        p, nm, n, R, W, mod = self.p, self.nm, self.n, self.R, self.W, self.mod
        size = R * nm
        U = [[0] * size for _ in range(size)]
        for j, b in enumerate(self.D.reps):
            for a in range(p):
                g = bt.mat_mul(b, (p, a, 0, 1))
                r, gam = self.D.lookup_edge(bt.normalize_edge(g, p, self.ctx.prec))
                tau = _tau_from(self.ctx, self.D.reps[r], gam.x, g, W)
                A, B, C, Dd = tau
                rows = transform_rows((p * A + a * C) % mod, (p * B + a * Dd) % mod, C, Dd, n, nm, mod)
                f = _det_factor(tau, n, mod, p)
                for i in range(nm):
                    Ui = U[j * nm + i]
                    row = rows[i]
                    off = r * nm
                    for t in range(nm):
                        if row[t]:
                            Ui[off + t] = (Ui[off + t] + f * row[t]) % mod
        self._up = U
        return U

    def stabilizer_average(self, X):
        """Average each Phi(b_j) over the stabilizer of the edge b_j."""
        p, nm, n, mod = self.p, self.nm, self.n, self.mod
        out = list(X)
        for j, b in enumerate(self.D.reps):
            st = self.D.edge_stabilizers[j // 2]
            if len(st) == 1:
                continue
            if len(st) % p == 0:
                raise PrecisionError("stabilizer order divisible by p; averaging is not available")
            acc = [0] * nm
            for s in st:
                tau = _tau_from(self.ctx, b, s.x, b, self.W)
                rows = transform_rows(*tau, n, nm, mod)
                f = _det_factor(tau, n, mod, p)
                for i in range(nm):
                    acc[i] += f * sum(rows[i][t] * X[j * nm + t] for t in range(nm))
            inv = inv_mod(len(st), mod)
            out[j * nm:(j + 1) * nm] = [x * inv % mod for x in acc]
        return out

    # iteration -----------------------------------------------------------------

    def apply_up(self, X):
        """Normalised Up, p^(-n/2) Up, on a residue vector (scale p^-e preserved)."""
        U = self.up_matrix()
        mod, ph = self.mod, self.p**self.h
        out = []
        for row in U:
            y = sum(a * x for a, x in zip(row, X) if a) % mod
            if y % ph:
                raise PrecisionError("moment denominators exceed the planned shift; increase precision")
            out.append(y // ph)
        return out

    def reset(self, X, X0):
        nm, k = self.nm, self.n + 1
        Y = list(X)
        for j in range(self.R):
            Y[j * nm:j * nm + k] = X0[j * nm:j * nm + k]
        return Y

    def residual(self, X):
        """min valuation of (p^(-n/2) Up X - X) as p-adic values (scale included)."""
        Y = self.apply_up(X)
        known = self.W - self.h
        worst = known
        for y, x in zip(Y, X):
            d = (y - x) % self.p**known
            if d:
                worst = min(worst, valuation(d, self.p))
        return worst - self.e


def _to_residue(x, p, e, mod):
    """Integer congruent to x * p^e modulo ``mod`` (x a Fraction, int or PadicNumber)."""
    if isinstance(x, PadicNumber):
        if x.is_zero():
            return 0
        if x.val + e < 0:
            raise PrecisionError("value not integral after the shift")
        return x.unit * p ** (x.val + e) % mod
    x = Fraction(x) * Fraction(p) ** e
    if x.denominator % p == 0:
        raise PrecisionError("value not integral after the shift")
    return x.numerator * inv_mod(x.denominator, mod) % mod


def _min_val(vals, p):
    out = 0
    for x in vals:
        if isinstance(x, PadicNumber):
            if not x.is_zero():
                out = min(out, x.val)
        elif x:
            out = min(out, valuation(Fraction(x), p))
    return out


def initial_lift(engine: MomentEngine, phi, pad: str = "zero", seed: int = 0):
    """Residue vector of Phi0: phi in moments 0..n, padding above, stabilizer-averaged."""
    p, nm, n = engine.p, engine.nm, engine.n
    rng = random.Random(seed)
    X = []
    for vals in phi:
        row = [_to_residue(x, p, engine.e, engine.mod) for x in vals]
        if pad == "zero":
            row += [0] * (nm - n - 1)
        elif pad == "random":
            row += [rng.randrange(engine.mod) for _ in range(nm - n - 1)]
        else:
            raise ValueError(f"unknown padding {pad!r}")
        X += row
    return engine.stabilizer_average(X)


def lift(space: HarmonicSpace, c: HarmonicCocycle, digits: int, M: int | None = None,
         pad: str = "zero", seed: int = 0, iterations: int | None = None, engine: MomentEngine | None = None) -> OvercForm:
    """The overconvergent lift of c (Up-eigenvalue p^(n/2)) to ``digits`` digits."""
    p, n = space.p, space.n
    pl = engine.plan if engine is not None else plan(digits, p, M)
    phi = space.to_automorphic(c)
    e = space.n // 2 - _min_val([x for v in phi for x in v], p)
    if engine is None or engine.e != e:
        engine = engine or MomentEngine(space, pl)
        engine.configure(e)
    X0 = initial_lift(engine, phi, pad, seed)
    X = engine.reset(X0, X0)
    count = pl.Nprime + GUARD if iterations is None else iterations
    for _ in range(count):
        X = engine.reset(engine.apply_up(X), X0)
    res = engine.residual(X)
    known = engine.W - engine.h - engine.e
    prec = min(pl.Nsecond, known)
    moments = []
    nm = engine.nm
    for j in range(engine.R):
        moments.append([PadicNumber.from_int_mod(p, x, known + engine.e, -engine.e).add_bigoh(prec)
                        for x in X[j * nm:(j + 1) * nm]])
    form = OvercForm(space, pl, moments, res, count)
    form.meta["engine"] = engine
    form.meta["residues"] = X
    form.meta["initial"] = X0
    return form


def exact_specialization_matches(form: OvercForm, c: HarmonicCocycle) -> bool:
    """True when moments 0..n of the lift reproduce the automorphic form of c exactly."""
    eng = form.meta["engine"]
    X, X0 = form.meta["residues"], form.meta["initial"]
    nm, k = eng.nm, form.n + 1
    phi = form.space.to_automorphic(c)
    for j in range(eng.R):
        for i in range(k):
            if X[j * nm + i] != _to_residue(phi[j][i], eng.p, eng.e, eng.mod):
                return False
    return True
