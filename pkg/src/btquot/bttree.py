"""Vertices and ordered edges of the Bruhat-Tits tree of PGL2(Qp).

A vertex is the homothety class of a lattice g*Zp^2, stored as the unique
lower-triangular representative (p^m, 0; r, p^n), 0 <= r < p^n, with the
common power of p removed.  An ordered edge is a coset g*Q^x*Gamma0(pZp);
the edge of g runs from [g] to [g*diag(1, p)].  Matrices are 4-tuples
(a, b, c, d) of integers; p-adic inputs are their reductions mod p**prec.

Conventions used throughout the package:
* the identity edge e0 = (v0, v1) with v1 = diag(1, p) v0;
* the ball attached to an edge g is the Moebius image g*Zp, i.e. the ends
  lying behind the origin of the edge.
"""

from __future__ import annotations

from typing import NamedTuple

from .padic import PadicQuadElement, PrecisionError, inv_mod

INF = 10**9


class Vertex(NamedTuple):
    a: int
    b: int
    c: int
    d: int


class Edge(NamedTuple):
    a: int
    b: int
    c: int
    d: int


def vp(x: int, p: int) -> int:
    if x == 0:
        return INF
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def mat_mul(x, y, mod=None):
    a, b, c, d = x
    e, f, g, h = y
    out = (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
    if mod is not None:
        return tuple(t % mod for t in out)
    return out


def adjugate(x):
    a, b, c, d = x
    return (d, -b, -c, a)


def det(x):
    return x[0] * x[3] - x[1] * x[2]


def _strip_common(m, p):
    k = min(vp(t, p) for t in m)
    if k == INF:
        raise PrecisionError("zero matrix")
    if k:
        q = p**k
        m = tuple(t // q for t in m)
    return m


def normalize_vertex(g, p: int, prec: int) -> Vertex:
    """Normal form of the vertex [g]; ``g`` is an integer matrix mod p**prec."""
    mod = p**prec
    a, b, c, d = (t % mod for t in g)
    va, vb = vp(a, p), vp(b, p)
    if va > vb:
        a, b, c, d = b, a, d, c
        va = vb
    if va >= prec:
        raise PrecisionError("first row vanishes at working precision")
    ua = inv_mod(a // p**va, mod)
    t = (b // p**va) * ua % mod
    d = (d - t * c) % mod
    c = c * ua % mod
    n = vp(d, p)
    if va + n >= prec:
        raise PrecisionError("determinant valuation exceeds working precision")
    pn = p**n
    r = c % pn
    m = (p**va, 0, r, pn)
    return Vertex(*_strip_common(m, p))


def normalize_edge(g, p: int, prec: int) -> Edge:
    """Normal form of the coset g*Q^x*Gamma0(pZp)."""
    mod = p**prec
    a, b, c, d = (t % mod for t in g)
    va, vb = vp(a, p), vp(b, p)
    if va <= vb:
        if va >= prec:
            raise PrecisionError("first row vanishes at working precision")
        ua = inv_mod(a // p**va, mod)
        t = (b // p**va) * ua % mod
        d = (d - t * c) % mod
        c = c * ua % mod
        n = vp(d, p)
        if va + n >= prec:
            raise PrecisionError("determinant valuation exceeds working precision")
        m = (p**va, 0, c % p ** (n + 1), p**n)
    else:
        ub = inv_mod(b // p**vb, mod)
        t = (a // p**vb) * ub % mod  # divisible by p
        c = (c - t * d) % mod
        d = d * ub % mod
        n = vp(c, p)
        if vb + n >= prec:
            raise PrecisionError("determinant valuation exceeds working precision")
        m = (0, p**vb, p**n, d % p**n)
    return Edge(*_strip_common(m, p))


def vertex_det_exp(v, p) -> int:
    return vp(det(v), p)


def parity(x, p) -> int:
    """Parity of the distance from v0 (of the origin, for an edge)."""
    return vp(det(x), p) % 2


V0 = Vertex(1, 0, 0, 1)
E0 = Edge(1, 0, 0, 1)


def origin(e: Edge, p: int) -> Vertex:
    return normalize_vertex(e, p, _exact_prec(e, p))


def terminus(e: Edge, p: int) -> Vertex:
    a, b, c, d = e
    return normalize_vertex((a, b * p, c, d * p), p, _exact_prec(e, p) + 1)


def opposite(e: Edge, p: int) -> Edge:
    a, b, c, d = e
    # e * (0, 1; p, 0)
    return normalize_edge((b * p, a, d * p, c), p, _exact_prec(e, p) + 1)


def _exact_prec(m, p) -> int:
    # reducing an exact matrix mod p^k moves its lattice class only once
    # k exceeds the valuation of the determinant
    return vp(det(m), p) + 2


_HS_CACHE: dict[int, list] = {}


def _edge_coset_reps(p):
    if p not in _HS_CACHE:
        _HS_CACHE[p] = [(1, 0, a, 1) for a in range(p)] + [(0, 1, 1, 0)]
    return _HS_CACHE[p]


def edges_out(v, p: int) -> list[Edge]:
    """The p+1 ordered edges with origin v, in a fixed order."""
    prec = _exact_prec(v, p) + 2
    return [normalize_edge(mat_mul(v, h), p, prec) for h in _edge_coset_reps(p)]


def neighbours(v, p: int) -> list[Vertex]:
    return [terminus(e, p) for e in edges_out(v, p)]


def distance(u, v, p: int) -> int:
    """Tree distance between vertices, from the elementary divisors of u* v."""
    m = mat_mul(adjugate(u), v)
    e1 = min(vp(t, p) for t in m)
    return vp(det(m), p) - 2 * e1


def act_vertex(gamma, v, p, prec) -> Vertex:
    return normalize_vertex(mat_mul(gamma, v, p**prec), p, prec)


def act_edge(gamma, e, p, prec) -> Edge:
    return normalize_edge(mat_mul(gamma, e, p**prec), p, prec)


def vertex_witness(g, p, prec):
    """(k, t) with g * p^k * t equal to the normal form, t in GL2(Zp) mod p^(prec - s).

    Returned t is reduced modulo p**(prec - v(det g)) and has unit determinant.
    """
    rep = normalize_vertex(g, p, prec)
    dg = det(g) % p**prec
    vd = vp(dg, p)
    k2 = vp(det(rep), p) - vd  # = 2k
    if k2 % 2:
        raise ValueError("determinant parity mismatch")
    k = k2 // 2
    num = mat_mul(adjugate(g), rep)
    # t = adj(g) rep / (det g * p^k)
    shift = vd + k
    mod = p ** (prec - vd)
    u = inv_mod((dg // p**vd) % mod, mod)
    if shift >= 0:
        t = tuple((x // p**shift) * u % mod if x % p**shift == 0 else None for x in num)
    else:
        t = tuple(x * p ** (-shift) * u % mod for x in num)
    if any(x is None for x in t):
        raise ValueError("witness is not integral")
    return k, t


def reduction_vertex(z: PadicQuadElement) -> Vertex:
    """The vertex whose affinoid contains z = x + y*w (y != 0).

    The closest disc of Qp to z is x + p^v(y) Zp, which is the ball g*Zp for
    g = (p^r, x; 0, 1).
    """
    x, y = z.a, z.b
    p = x.p
    if y.is_zero():
        raise PrecisionError("point is indistinguishable from P^1(Qp)")
    r = y.valuation()
    prec = x.prec
    if not x.is_zero() and x.valuation() < r:
        # truncate x to its class modulo p^r
        xv = x.val
        xint_num = x.unit % p ** max(0, r - xv)
    else:
        xv = r
        xint_num = 0
    # g = (p^r, x; 0, 1) scaled by p^s to be integral
    s = max(0, -r, -xv)
    top_left = p ** (r + s)
    top_right = xint_num * p ** (xv + s) if xint_num else 0
    g = (top_left, top_right, 0, p**s)
    return normalize_vertex(g, p, max(prec, r + 2 * s) + s + 2)
