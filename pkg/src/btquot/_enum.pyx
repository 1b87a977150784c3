# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Fincke-Pohst enumeration; same contract as ``_enum_py.enumerate_short``."""

from libc.math cimport sqrt, ceil, floor, fabs


def enumerate_short(q, double bound):
    cdef int n = len(q)
    if n > 8:
        raise ValueError("rank above 8 is not supported by the compiled kernel")
    cdef double Q[8][8]
    cdef long x[8]
    cdef long hi[8]
    cdef double t[9]
    cdef double c[8]
    cdef int i, j, k
    cdef double y, r, s, eps
    for i in range(n):
        for j in range(n):
            Q[i][j] = q[i][j]
        x[i] = 0
    eps = 1e-9 * (1.0 + fabs(bound))
    out = []
    t[n] = bound
    i = n - 1
    # iterative enumeration; x[i] walks from its lower bound to hi[i]
    s = 0.0
    for j in range(i + 1, n):
        s += Q[i][j] * x[j]
    c[i] = -s
    r = sqrt(t[i + 1] / Q[i][i]) if t[i + 1] > 0 else 0.0
    x[i] = <long>ceil(c[i] - r - 1e-9)
    hi[i] = <long>floor(c[i] + r + 1e-9)
    while True:
        if x[i] > hi[i]:
            i += 1
            if i >= n:
                break
            x[i] += 1
            continue
        y = x[i] - c[i]
        t[i] = t[i + 1] - Q[i][i] * y * y
        if t[i] < -eps:
            x[i] += 1
            continue
        if i == 0:
            for k in range(n):
                if x[k] != 0:
                    out.append(tuple([x[j] for j in range(n)]))
                    break
            x[0] += 1
            continue
        i -= 1
        s = 0.0
        for j in range(i + 1, n):
            s += Q[i][j] * x[j]
        c[i] = -s
        r = sqrt(t[i + 1] / Q[i][i]) if t[i + 1] > 0 else 0.0
        x[i] = <long>ceil(c[i] - r - 1e-9)
        hi[i] = <long>floor(c[i] + r + 1e-9)
    seen = set()
    result = []
    for v in out:
        k = 0
        while v[k] == 0:
            k += 1
        w = v if v[k] > 0 else tuple([-a for a in v])
        if w not in seen:
            seen.add(w)
            result.append(w)
    return result
