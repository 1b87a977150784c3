"""Gamma-invariant harmonic cocycles with values in V_n, and Hecke operators on them.

Conventions.  P_n is the space of polynomials of degree <= n with the right
action (P|m)(t) = (ct+d)^n P((at+b)/(ct+d)); V_n is its dual with the left
action (m.w)(P) = w(P|m), stored as the values w(t^0), ..., w(t^n).  A
cocycle is invariant when c(gamma e) = gamma.c(e), where gamma is the matrix
iota(x)/p^m of determinant one.  The ball attached to an edge g is g*Zp, so
c(e)(P) is the integral of P over that ball against the boundary distribution.

A cocycle is stored by its values on the E positive representatives (the
ordered representative whose origin is at even distance from v0).  In weight
2 everything is exact over Q; in higher weight values are p-adic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd

from . import bttree as bt
from .arithgroup import GammaElement, elements_of_norm, iota4
from .fundom import FundamentalDomain
from .padic import PadicNumber, PrecisionError
from .plinalg import integer_roots, padic_kernel, rational_charpoly, rational_kernel, rref
from .quatalg import factorization, kronecker, prime_factors


class DimensionMismatch(PrecisionError):
    pass


# --- dimension formulas --------------------------------------------------------


def _euler_phi(n):
    out = n
    for q in prime_factors(n):
        out = out // q * (q - 1)
    return out


def _divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


def delta_k(k: int, N: int) -> int:
    """dim S_k(Gamma0(N)) for even k >= 2, from the index / elliptic point / cusp formula."""
    if k < 2 or k % 2:
        raise ValueError("weight must be even and >= 2")
    fac = factorization(N)
    mu = N
    for q in fac:
        mu = mu * (q + 1) // q
    nu2 = 0 if N % 4 == 0 else _prod(1 + kronecker(-4, q) for q in fac)
    nu3 = 0 if N % 9 == 0 else _prod(1 + kronecker(-3, q) for q in fac)
    cusps = sum(_euler_phi(gcd(d, N // d)) for d in _divisors(N))
    g = 1 + Fraction(mu, 12) - Fraction(nu2, 4) - Fraction(nu3, 3) - Fraction(cusps, 2)
    if k == 2:
        return int(g)
    return int((k - 1) * (g - 1) + (k // 2 - 1) * cusps + nu2 * (k // 4) + nu3 * (k // 3))


def _prod(it):
    out = 1
    for x in it:
        out *= x
    return out


def dim_formula(k: int, L: int, Nplus: int) -> int:
    """Dimension of the L-new part: d_k(L, N+) by the divisor recursion."""

    @lru_cache(maxsize=None)
    def d(m):
        if m == 1:
            return delta_k(k, Nplus)
        total = delta_k(k, m * Nplus)
        for t in _divisors(m):
            if t != m:
                total -= len(_divisors(m // t)) * d(t)
        return total

    return d(L)


# --- the V_n action --------------------------------------------------------------


def _poly_mul(a, b, mod=None):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    if mod is not None:
        out = [v % mod for v in out]
    return out


def _poly_pow(a, e, mod=None):
    out = [1]
    for _ in range(e):
        out = _poly_mul(out, a, mod)
    return out


def vn_action_matrix(m, n: int, mod=None):
    """Matrix A with (m.w)_j = sum_i A[j][i] w_i, for m = (a, b, c, d).

    A[j][i] is the coefficient of t^i in (at+b)^j (ct+d)^(n-j).  Entries may be
    integers (optionally reduced mod ``mod``), Fractions or PadicNumbers.
    """
    a, b, c, d = m
    lin1 = [b, a]
    lin2 = [d, c]
    pw1 = [[1]]
    pw2 = [[1]]
    for _ in range(n):
        pw1.append(_poly_mul(pw1[-1], lin1, mod))
        pw2.append(_poly_mul(pw2[-1], lin2, mod))
    A = []
    for j in range(n + 1):
        row = _poly_mul(pw1[j], pw2[n - j], mod)
        row = row + [0] * (n + 1 - len(row))
        A.append(row[: n + 1])
    return A


def act_Vn(w, m, side: str = "left"):
    """Left action m.w, or right action w.m = m^-1 . w (m given with exact entries)."""
    n = len(w) - 1
    if side == "right":
        a, b, c, d = m
        det = a * d - b * c
        m = (Fraction(d) / det, Fraction(-b) / det, Fraction(-c) / det, Fraction(a) / det)
    A = vn_action_matrix(m, n)
    return [sum(A[j][i] * w[i] for i in range(n + 1)) for j in range(n + 1)]


# --- cocycles ---------------------------------------------------------------------


@dataclass
class HarmonicCocycle:
    space: "HarmonicSpace"
    values: list  # per positive rep, a list of n+1 values (Fraction or PadicNumber)

    @property
    def n(self):
        return self.space.n

    def flat(self):
        return [x for v in self.values for x in v]

    def value_at_rep(self, idx: int):
        v = self.values[idx // 2]
        return v if idx % 2 == 0 else [-x for x in v]

    def __call__(self, e):
        """c(e) for an arbitrary ordered edge e."""
        idx, g = self.space.D.lookup_edge(e)
        return self.space.apply_gamma_inverse(g, self.value_at_rep(idx))

    def __add__(self, other):
        return HarmonicCocycle(self.space, [[a + b for a, b in zip(u, v)] for u, v in zip(self.values, other.values)])

    def scale(self, s):
        return HarmonicCocycle(self.space, [[s * a for a in u] for u in self.values])


class HarmonicSpace:
    """C_h(Gamma, V_n) for a fundamental domain D."""

    def __init__(self, D: FundamentalDomain, n: int = 0, prec: int | None = None):
        if n % 2 or n < 0:
            raise ValueError("n must be even and non-negative")
        self.D = D
        self.ctx = D.ctx
        self.p = D.p
        self.n = n
        self.exact = n == 0
        self.prec = prec or self.ctx.prec
        if self.prec > self.ctx.prec:
            raise PrecisionError("harmonic working precision exceeds the splitting precision")
        self.E = D.E
        self.size = self.E * (n + 1)
        self.expected_dim = dim_formula(n + 2, self.p * self.ctx.Nminus, self.ctx.Nplus)
        self._basis = None
        self._free = None
        self.basis_prec = None

    # group actions on values -----------------------------------------------

    def _padic(self, x: int, shift: int = 0):
        return PadicNumber.from_int_mod(self.p, x, self.prec, shift)

    def matrix_of(self, x, m: int):
        """Action matrix on V_n of iota(x)/p^m (x in order coordinates)."""
        n = self.n
        if n == 0:
            return [[Fraction(1)]]
        mod = self.p**self.prec
        A = vn_action_matrix(iota4(self.ctx, x), n, mod)
        return [[self._padic(v, -m * n) for v in row] for row in A]

    def apply_matrix(self, A, w):
        n = self.n
        return [_dot(A[j], w) for j in range(n + 1)]

    def apply_gamma(self, g: GammaElement, w):
        return self.apply_matrix(self.matrix_of(g.x, g.m), w)

    def apply_gamma_inverse(self, g: GammaElement, w):
        return self.apply_matrix(self.matrix_of(self.ctx.conj(g.x), g.m), w)

    # the linear system ---------------------------------------------------------

    def _blocks_int(self, x, m, M):
        """Integer residues of p^(M n) * action(iota(x)/p^m), M >= m."""
        mod = self.p**self.prec
        A = vn_action_matrix(iota4(self.ctx, x), self.n, mod)
        s = self.p ** ((M - m) * self.n)
        return [[v * s % mod for v in row] for row in A]

    def relations(self):
        """Rows of the harmonicity and stabilizer-invariance relations.

        Exact Fractions in weight 2; integer residues mod p^prec otherwise.
        """
        n, E, D, ctx = self.n, self.E, self.D, self.ctx
        rows = []
        for w in D.vertices:
            entries = []
            for e, (idx, g) in D.tables[w].items():
                sign = 1 if idx % 2 == 0 else -1
                entries.append((idx // 2, sign, ctx.conj(g.x), g.m))
            if self.exact:
                row = [Fraction(0)] * self.size
                for j, sign, _, _ in entries:
                    row[j] += sign
                rows.append(row)
                continue
            M = max(t[3] for t in entries)
            block_rows = [[0] * self.size for _ in range(n + 1)]
            for j, sign, x, m in entries:
                A = self._blocks_int(x, m, M)
                for r in range(n + 1):
                    for s in range(n + 1):
                        block_rows[r][j * (n + 1) + s] += sign * A[r][s]
            rows += block_rows
        if not self.exact:
            for j in range(E):
                for s in D.edge_stabilizers[j][1:]:
                    A = self._blocks_int(s.x, s.m, s.m)
                    for r in range(n + 1):
                        row = [0] * self.size
                        for c in range(n + 1):
                            row[j * (n + 1) + c] = A[r][c] - (self.p ** (s.m * n) if r == c else 0)
                        rows.append(row)
        return rows

    def basis(self):
        """A basis of C_h(Gamma, V_n); its size must equal dim_formula."""
        if self._basis is not None:
            return self._basis
        rows = self.relations()
        if self.exact:
            vecs, free = rational_kernel(rows, self.size)
        else:
            vecs, free, self.basis_prec = padic_kernel(rows, self.p, self.prec, self.size)
        if len(vecs) != self.expected_dim:
            raise DimensionMismatch(
                f"kernel dimension {len(vecs)} != dim_formula {self.expected_dim} (n={self.n}); raise precision"
            )
        self._free = free
        self._basis = [self._from_flat(v) for v in vecs]
        return self._basis

    def _from_flat(self, v):
        k = self.n + 1
        return HarmonicCocycle(self, [list(v[i * k:(i + 1) * k]) for i in range(self.E)])

    def zero(self):
        z = Fraction(0) if self.exact else PadicNumber.zero(self.p, self.prec)
        return HarmonicCocycle(self, [[z] * (self.n + 1) for _ in range(self.E)])

    def coordinates(self, c: HarmonicCocycle):
        """Coordinates of c in basis() (values at the free columns)."""
        self.basis()
        flat = c.flat()
        return [flat[f] for f in self._free]

    def combination(self, coeffs):
        out = self.zero()
        for a, b in zip(coeffs, self.basis()):
            out = out + b.scale(a)
        return out

    # checks ----------------------------------------------------------------------

    def defect(self, c: HarmonicCocycle):
        """Largest violation of the relations, as a valuation (exact: 0 means satisfied)."""
        flat = c.flat()
        rows = self.relations()
        worst = None
        for row in rows:
            if self.exact:
                s = sum(a * b for a, b in zip(row, flat))
                if s != 0:
                    return float("-inf")
            else:
                s = _dot([self._padic(a) for a in row], flat)
                v = s.valuation() if not s.is_zero() else s.prec
                worst = v if worst is None else min(worst, v)
        return worst

    def vertex_sums(self, c: HarmonicCocycle, vertex):
        """sum of c(e) over the p+1 edges leaving ``vertex`` (any vertex of the tree)."""
        total = None
        for e in bt.edges_out(vertex, self.p):
            v = c(e)
            total = v if total is None else [a + b for a, b in zip(total, v)]
        return total

    # Hecke operators -----------------------------------------------------------

    def _operator_from(self, terms_for_rep):
        """Matrix on the unknown vector: out[rep j] = sum of (sign, x, m) terms acting on c(rep)."""
        n, k = self.n, self.n + 1
        size = self.size
        if self.exact:
            M = [[Fraction(0)] * size for _ in range(size)]
        else:
            z = PadicNumber.zero(self.p, self.prec)
            M = [[z] * size for _ in range(size)]
        for j in range(self.E):
            for (target, sign, x, m) in terms_for_rep(j):
                A = self.matrix_of(x, m)
                for r in range(k):
                    for s in range(k):
                        M[j * k + r][target * k + s] = M[j * k + r][target * k + s] + sign * A[r][s]
        return M

    def apply_operator(self, M, c: HarmonicCocycle):
        flat = c.flat()
        return self._from_flat([_dot(row, flat) for row in M])

    def operator_in_basis(self, M):
        """Matrix (columns = images of basis vectors) in the coordinates of basis()."""
        B = self.basis()
        cols = [self.coordinates(self.apply_operator(M, b)) for b in B]
        d = len(B)
        return [[cols[c][r] for c in range(d)] for r in range(d)]

    def up_operator(self):
        """Up by the cocycle formula: p^(n/2) * sum over e' with o(e') = t(e), e' != ebar."""
        D, ctx, p = self.D, self.ctx, self.p
        half = self.n // 2

        def terms(j):
            e = D.reps[2 * j]
            eb = bt.opposite(e, p)
            out = []
            for e2 in bt.edges_out(bt.terminus(e, p), p):
                if e2 == eb:
                    continue
                idx, g = D.lookup_edge(e2)
                sign = 1 if idx % 2 == 0 else -1
                out.append((idx // 2, sign * p**half, ctx.conj(g.x), g.m))
            return out

        return self._operator_from(terms)

    def hecke_reps(self, ell: int):
        return hecke_coset_reps(self.ctx, ell)

    def hecke_operator(self, ell: int):
        """T_ell: (T c)(e) = sum_i conj(g_i) . c(g_i e) over the ell+1 classes Gamma g_i."""
        ctx, p, D = self.ctx, self.p, self.D
        if (p * ctx.Nminus * ctx.Nplus) % ell == 0:
            raise ValueError("ell must be coprime to p N- N+")
        reps = hecke_coset_reps(ctx, ell)

        def terms(j):
            e = D.reps[2 * j]
            out = []
            for x, k in reps:
                ge = bt.normalize_edge(bt.mat_mul(iota4(ctx, x), e, p**ctx.prec), p, ctx.prec)
                idx, g = D.lookup_edge(ge)
                sign = 1 if idx % 2 == 0 else -1
                y = ctx.mul(ctx.conj(x), ctx.conj(g.x))
                out.append((idx // 2, sign, y, k + g.m))
            return out

        return self._operator_from(terms)

    def atkin_lehner(self, q: int):
        """c |-> conj(w) . c(w e) for an element w of R of reduced norm q (q | N-), weight 2 scaling."""
        ctx, p, D = self.ctx, self.p, self.D
        w = atkin_lehner_element(ctx, q)

        def terms(j):
            e = D.reps[2 * j]
            ge = bt.normalize_edge(bt.mat_mul(iota4(ctx, w), e, p**ctx.prec), p, ctx.prec)
            idx, g = D.lookup_edge(ge)
            sign = 1 if idx % 2 == 0 else -1
            return [(idx // 2, sign, ctx.mul(ctx.conj(w), ctx.conj(g.x)), g.m)]

        return self._operator_from(terms)

    # automorphic forms ---------------------------------------------------------

    def to_automorphic(self, c: HarmonicCocycle):
        """phi(b) = det(b)^(-n/2) adj(b) . c(b) on all 2E ordered representatives."""
        out = []
        for idx, b in enumerate(self.D.reps):
            out.append(self._adj_twist(b, c.value_at_rep(idx), inverse=False))
        return out

    def from_automorphic(self, phi):
        """Inverse of to_automorphic, read off on the positive representatives."""
        vals = []
        for j in range(self.E):
            b = self.D.reps[2 * j]
            vals.append(self._adj_twist(b, phi[2 * j], inverse=True))
        return HarmonicCocycle(self, vals)

    def _adj_twist(self, b, w, inverse):
        n = self.n
        if n == 0:
            return list(w)
        p = self.p
        a_, b_, c_, d_ = b
        det = a_ * d_ - b_ * c_
        v = bt.vp(det, p)
        unit = det // p**v
        if not inverse:
            # det^(-n/2) adj(b)
            A = vn_action_matrix((d_, -b_, -c_, a_), n)
            s = Fraction(1, unit ** (n // 2))
            shift = -v * (n // 2)
        else:
            # det^(-n/2) b . w  (inverse of det^(-n/2) adj(b) . since adj(b) b = det)
            A = vn_action_matrix((a_, b_, c_, d_), n)
            s = Fraction(1, unit ** (n // 2))
            shift = -v * (n // 2)
        scale = PadicNumber.from_rational(p, s, self.prec) * PadicNumber.from_rational(p, Fraction(p) ** shift, self.prec)
        return [scale * _dot([PadicNumber.from_rational(p, x, self.prec) for x in A[j]], w) for j in range(n + 1)]


def _dot(row, vec):
    total = None
    for a, b in zip(row, vec):
        if isinstance(a, int) and a == 0:
            continue
        t = b * a if isinstance(a, (int, Fraction)) and not isinstance(b, (int, Fraction)) else a * b
        total = t if total is None else total + t
    if total is None:
        for b in vec:
            if isinstance(b, PadicNumber):
                return PadicNumber.zero(b.p, b.prec)
        return Fraction(0)
    return total


# --- Hecke coset representatives ------------------------------------------------


def hecke_coset_reps(ctx, ell: int, max_k: int = 6):
    """ell+1 representatives x/p^k of Gamma \\ {nrd = ell}: pairs (x, k), x in R."""
    classes = []
    for k in range(max_k + 1):
        for x in elements_of_norm(ctx, ell * ctx.p ** (2 * k)):
            if k and all(c % ctx.p == 0 for c in x):
                continue
            if any(_same_class(ctx, x, y, ell) for y, _ in classes):
                continue
            classes.append((x, k))
            if len(classes) == ell + 1:
                return classes
    raise RuntimeError(f"found only {len(classes)} of {ell + 1} Hecke classes for ell = {ell}")


def _same_class(ctx, x, y, ell):
    z = ctx.mul(x, ctx.conj(y))
    return all(c % ell == 0 for c in z)


def atkin_lehner_element(ctx, q: int):
    els = elements_of_norm(ctx, q)
    if not els:
        raise ValueError(f"no element of reduced norm {q} in the order")
    return els[0]


# --- eigenbases (weight 2, exact) -----------------------------------------------------


def _restrict(M, sub):
    """Matrix of M on the invariant subspace spanned by the columns ``sub`` (exact)."""
    # solve sub * X = M * sub
    d = len(sub)
    n = len(sub[0])
    img = [[sum(M[r][t] * v[t] for t in range(n)) for r in range(n)] for v in sub]
    X = []
    for w in img:
        aug = [[sub[c][r] for c in range(d)] + [w[r]] for r in range(n)]
        R, piv = rref(aug)
        if d in piv:
            raise ValueError("subspace is not invariant")
        sol = [Fraction(0)] * d
        for row, pc in zip(R, piv):
            sol[pc] = row[d]
        X.append(sol)
    return [[X[c][r] for c in range(d)] for r in range(d)]


def eigen_decomposition(space: HarmonicSpace, primes):
    """Split C_h into simultaneous T_ell eigenlines with integer eigenvalues.

    Returns (vectors in basis coordinates, eigenvalue dicts, ok flag); ok is
    False if some piece could not be split into lines over Q.
    """
    if not space.exact:
        raise NotImplementedError("eigenbases are computed in weight 2 only")
    d = len(space.basis())
    pieces = [[[Fraction(int(i == j)) for i in range(d)] for j in range(d)]]  # list of lists of vectors
    evals = [dict()]
    for ell in primes:
        T = space.operator_in_basis(space.hecke_operator(ell))
        new_pieces, new_evals = [], []
        for sub, ev in zip(pieces, evals):
            if len(sub) == 1:
                v = sub[0]
                Tv = [sum(T[r][t] * v[t] for t in range(d)) for r in range(d)]
                k = next(i for i, x in enumerate(v) if x)
                new_pieces.append(sub)
                new_evals.append({**ev, ell: Tv[k] / v[k]})
                continue
            Tr = _restrict(T, sub)
            roots = integer_roots(rational_charpoly(Tr))
            split = False
            for lam in sorted(set(roots)):
                K = [[Tr[r][c] - (lam if r == c else 0) for c in range(len(sub))] for r in range(len(sub))]
                ker, _ = rational_kernel(K, len(sub))
                vecs = [[sum(kv[c] * sub[c][r] for c in range(len(sub))) for r in range(d)] for kv in ker]
                new_pieces.append(vecs)
                new_evals.append({**ev, ell: Fraction(lam)})
                split = True
            covered = sum(len(x) for x in new_pieces[-len(set(roots)):]) if split else 0
            if not split or covered < len(sub):
                # keep the remainder unsplit (non-rational eigenvalues)
                if not split:
                    new_pieces.append(sub)
                    new_evals.append(ev)
        pieces, evals = new_pieces, new_evals
    ok = all(len(s) == 1 for s in pieces) and sum(len(s) for s in pieces) == d
    vectors = [s[0] for s in pieces if len(s) == 1]
    return vectors, [e for s, e in zip(pieces, evals) if len(s) == 1], ok
