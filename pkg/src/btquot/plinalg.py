"""Linear algebra over Q (exact) and over Zp (residues mod p^N with tracked loss)."""

from __future__ import annotations

from fractions import Fraction

from .padic import PadicNumber, PrecisionError, inv_mod, valuation


def rref(rows):
    """Reduced row echelon form over Q; returns (matrix, pivot columns)."""
    A = [[Fraction(x) for x in r] for r in rows]
    if not A:
        return A, []
    ncol = len(A[0])
    pivots = []
    r = 0
    for c in range(ncol):
        piv = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A[:r], pivots


def rational_kernel(rows, ncol=None):
    """Basis of {x : A x = 0} over Q; one vector per free column (value 1 there)."""
    if ncol is None:
        ncol = len(rows[0])
    R, piv = rref(rows) if rows else ([], [])
    free = [c for c in range(ncol) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncol
        v[f] = Fraction(1)
        for row, pc in zip(R, piv):
            v[pc] = -row[f]
        basis.append(v)
    return basis, free


def solve_in_span(basis, free, v):
    """Coordinates of v in a kernel basis returned by ``rational_kernel``/``padic_kernel``."""
    return [v[f] for f in free]


def rational_charpoly(M):
    """Characteristic polynomial det(xI - M), coefficients from degree 0 upward (Faddeev-LeVerrier)."""
    n = len(M)
    M = [[Fraction(x) for x in r] for r in M]
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    Mk = [[Fraction(0)] * n for _ in range(n)]
    ident = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        # Mk = M (M_{k-1} + c_{n-k+1} I)
        prev = [[Mk[i][j] + coeffs[n - k + 1] * ident[i][j] for j in range(n)] for i in range(n)]
        Mk = [[sum(M[i][t] * prev[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        coeffs[n - k] = -sum(Mk[i][i] for i in range(n)) / k
    return coeffs


def integer_roots(coeffs):
    """Integer roots (with multiplicity) of a monic rational polynomial."""
    from sympy import Poly, Rational, roots, symbols

    x = symbols("x")
    P = Poly([Rational(c.numerator, c.denominator) for c in reversed(coeffs)], x)
    out = []
    for r, mult in roots(P, filter="Z").items():
        out += [int(r)] * mult
    return sorted(out)


def padic_kernel(rows, p: int, N: int, ncol=None):
    """Kernel over Qp of an integral matrix known modulo p^N.

    Complete pivoting keeps all row operations inside Zp.  Returns
    (basis, free, prec): basis vectors are lists of PadicNumber with value 1 at
    their free column, and ``prec`` is the absolute precision guaranteed for
    every entry (N minus the accumulated pivot valuations).
    """
    mod = p**N
    A = [[int(x) % mod for x in r] for r in rows]
    if ncol is None:
        ncol = len(A[0])
    col_order = list(range(ncol))
    nrow = len(A)
    rank = 0
    loss = 0
    pivot_cols = []
    while rank < min(nrow, ncol):
        best = None
        for i in range(rank, nrow):
            row = A[i]
            for jj in range(rank, ncol):
                x = row[col_order[jj]]
                if x:
                    v = valuation(x, p)
                    if best is None or v < best[0]:
                        best = (v, i, jj)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, i, jj = best
        A[rank], A[i] = A[i], A[rank]
        col_order[rank], col_order[jj] = col_order[jj], col_order[rank]
        c = col_order[rank]
        prow = A[rank]
        pu = inv_mod(prow[c] // p**v, mod)
        modv = p ** (N - v) if v < N else 1
        for k in range(rank + 1, nrow):
            x = A[k][c]
            if x:
                f = (x // p**v) * pu % modv
                A[k] = [(a - f * b) % mod for a, b in zip(A[k], prow)]
        loss += v
        pivot_cols.append(c)
        rank += 1
    if loss >= N:
        raise PrecisionError(f"pivot valuations ({loss}) exhaust the working precision {N}")
    free = [c for c in range(ncol) if c not in pivot_cols]
    U = A[:rank]
    basis = []
    for f in free:
        sol = {f: Fraction(1)}
        for r in range(rank - 1, -1, -1):
            c = pivot_cols[r]
            s = Fraction(0)
            for cc, val in sol.items():
                if U[r][cc]:
                    s += U[r][cc] * val
            sol[c] = -s / U[r][c]
        vec = []
        for c in range(ncol):
            x = sol.get(c, Fraction(0))
            vec.append(PadicNumber.from_rational(p, x, N - loss))
        basis.append(vec)
    return basis, free, N - loss


def padic_matmul_vec(M, v):
    return [sum((a * b for a, b in zip(row, v)), start=_zero_like(v)) for row in M]


def _zero_like(v):
    for x in v:
        if isinstance(x, PadicNumber):
            return PadicNumber.zero(x.p, x.prec)
    return 0
