"""Integer lattices: congruence sublattices, exact LLL on a Gram matrix, short vectors.

The enumeration step runs in the compiled ``_enum`` extension when it is
available and falls back to ``_enum_py`` otherwise; set ``BTQUOT_PURE=1`` to
force the fallback.
"""

from __future__ import annotations

import os
from fractions import Fraction

from .padic import inv_mod

if os.environ.get("BTQUOT_PURE"):
    from ._enum_py import enumerate_short as _enumerate
    KERNEL = "python"
else:
    try:
        from ._enum import enumerate_short as _enumerate
        KERNEL = "cython"
    except ImportError:  # extension not built
        from ._enum_py import enumerate_short as _enumerate
        KERNEL = "python"


def _vp(x, p):
    if x == 0:
        return None
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def congruence_sublattice(basis, constraints, p):
    """Basis of {x in span(basis) : <c, x> = 0 mod p^e for every (c, e)}.

    ``basis`` is a list of integer row vectors; each constraint is a pair
    (coefficient vector, exponent).  One basis vector absorbs each constraint
    and the others are cleared against it, so the index is tracked exactly.
    """
    basis = [list(b) for b in basis]
    for c, e in constraints:
        if e <= 0:
            continue
        mod = p**e
        w = [sum(ci * bi for ci, bi in zip(c, b)) % mod for b in basis]
        vals = [_vp(x, p) for x in w]
        piv = None
        for k, v in enumerate(vals):
            if v is not None and (piv is None or v < vals[piv]):
                piv = k
        if piv is None:
            continue
        t = vals[piv]
        modt = p ** (e - t)
        uinv = inv_mod((w[piv] // p**t) % modt, modt)
        for k in range(len(basis)):
            if k == piv or w[k] == 0:
                continue
            q = (w[k] // p**t) * uinv % modt
            basis[k] = [x - q * y for x, y in zip(basis[k], basis[piv])]
        basis[piv] = [x * modt for x in basis[piv]]
    return basis


def gram(basis, form):
    """B * form * B^T for row-vector basis B."""
    n = len(basis)
    fb = [[sum(form[i][k] * b[k] for k in range(len(b))) for i in range(len(form))] for b in basis]
    return [[sum(basis[i][k] * fb[j][k] for k in range(len(fb[j]))) for j in range(n)] for i in range(n)]


def lll_gram(G, delta=Fraction(99, 100)):
    """Exact LLL on a positive definite integer Gram matrix (integral version, Cohen 2.6.7).

    Returns the unimodular transform U (rows = new basis in old coordinates)
    and the reduced Gram matrix U G U^T.
    """
    n = len(G)
    G = [list(map(int, row)) for row in G]
    a, b = delta.numerator, delta.denominator
    H = [[int(i == j) for j in range(n)] for i in range(n)]
    d = [1] + [0] * n  # d[i] for i = 0..n (1-based vectors)
    lam = [[0] * (n + 1) for _ in range(n + 1)]

    def dot_orig(k, j):
        # b_k . b_j with b_k still the original k-th vector
        return sum(H[j - 1][t] * G[t][k - 1] for t in range(n))

    def redi(k, l):
        if 2 * abs(lam[k][l]) > d[l]:
            q = (2 * lam[k][l] + d[l]) // (2 * d[l])
            H[k - 1] = [x - q * y for x, y in zip(H[k - 1], H[l - 1])]
            lam[k][l] -= q * d[l]
            for i in range(1, l):
                lam[k][i] -= q * lam[l][i]

    def swapi(k):
        H[k - 1], H[k - 2] = H[k - 2], H[k - 1]
        for j in range(1, k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lk = lam[k][k - 1]
        B = (d[k - 2] * d[k] + lk * lk) // d[k - 1]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k] * lam[i][k - 1] - lk * t) // d[k - 1]
            lam[i][k - 1] = (B * t + lk * lam[i][k]) // d[k]
        d[k - 1] = B

    if n == 0:
        return H, G
    d[1] = G[0][0]
    k, kmax = 2, 1
    while k <= n:
        if k > kmax:
            kmax = k
            for j in range(1, k + 1):
                u = dot_orig(k, j)
                for i in range(1, j):
                    u = (d[i] * u - lam[k][i] * lam[j][i]) // d[i - 1]
                if j < k:
                    lam[k][j] = u
                else:
                    if u == 0:
                        raise ValueError("Gram matrix is not positive definite")
                    d[k] = u
        redi(k, k - 1)
        if b * d[k] * d[k - 2] < a * d[k - 1] ** 2 - b * lam[k][k - 1] ** 2:
            swapi(k)
            k = max(2, k - 1)
            continue
        for l in range(k - 2, 0, -1):
            redi(k, l)
        k += 1
    return H, gram(H, G)


def _quad(x, G):
    return sum(x[i] * G[i][j] * x[j] for i in range(len(x)) for j in range(len(x)))


def _float_cholesky(G):
    n = len(G)
    q = [[float(Fraction(G[i][j])) for j in range(n)] for i in range(n)]
    # Cohen's algorithm 2.7.6 (q becomes the decomposition in place)
    for i in range(n):
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    return q


def short_vectors(G, bound):
    """All nonzero x (up to sign) with x^T G x <= bound, verified exactly.

    G must be positive definite; it is LLL-reduced internally.  Returned
    vectors are in the original coordinates, sorted.
    """
    U, Gr = lll_gram(G)
    q = _float_cholesky(Gr)
    slack = 1e-7 * (1 + abs(float(bound)))
    cands = _enumerate(q, float(bound) + slack)
    n = len(G)
    out = set()
    for y in cands:
        x = [sum(y[i] * U[i][j] for i in range(n)) for j in range(n)]
        if _quad(x, G) <= bound:
            k = next(k for k, c in enumerate(x) if c)
            if x[k] < 0:
                x = [-c for c in x]
            out.add(tuple(x))
    return sorted(out)


def minimum(G):
    """The minimum of x^T G x over nonzero integer x, and all its minimisers."""
    U, Gr = lll_gram(G)
    bound = min(Gr[i][i] for i in range(len(Gr)))
    vecs = short_vectors(G, bound)
    m = min(_quad(v, G) for v in vecs)
    return m, [v for v in vecs if _quad(v, G) == m]
