"""Pure-Python Fincke-Pohst enumeration (fallback for the compiled kernel)."""

import math


def enumerate_short(q, bound):
    """All nonzero integer vectors x, up to sign, with sum_i q[i][i]*(x_i + sum_{j>i} q[i][j] x_j)^2 <= bound.

    ``q`` is the n x n float matrix of the Cholesky-type decomposition of the
    form (diagonal entries are the squared Gram-Schmidt lengths).  Returns a
    list of tuples; the first nonzero coordinate of each is positive.
    """
    n = len(q)
    out = []
    x = [0] * n
    t = [0.0] * (n + 1)  # remaining budget below level i
    centre = [0.0] * n
    t[n] = bound

    def recurse(i):
        c = -sum(q[i][j] * x[j] for j in range(i + 1, n))
        centre[i] = c
        qi = q[i][i]
        r = math.sqrt(max(t[i + 1], 0.0) / qi)
        lo = math.ceil(c - r - 1e-9)
        hi = math.floor(c + r + 1e-9)
        for xi in range(lo, hi + 1):
            y = xi - c
            rem = t[i + 1] - qi * y * y
            if rem < -1e-9 * (1.0 + abs(bound)):
                continue
            x[i] = xi
            if i == 0:
                if any(x):
                    out.append(tuple(x))
            else:
                t[i] = rem
                recurse(i - 1)
        x[i] = 0

    recurse(n - 1)
    seen = set()
    result = []
    for v in out:
        k = next(k for k, c in enumerate(v) if c)
        w = v if v[k] > 0 else tuple(-c for c in v)
        if w not in seen:
            seen.add(w)
            result.append(w)
    return result
