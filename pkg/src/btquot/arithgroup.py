"""The group Gamma of norm-one elements of R[1/p] acting on the tree.

Equivalence of two vertices (or edges) u, v at total determinant valuation
2m reduces to a short-vector problem: gamma = iota(x)/p^m maps u to v exactly
when x lies in the lattice {x in R : v* iota(x) u = 0 mod p^2m} (for edges
the lower-left entry must vanish mod p^(2m+1) as well) and nrd(x) = p^2m,
which is the smallest norm such a lattice can contain.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import bttree as bt
from .lattice import congruence_sublattice, gram, short_vectors
from .padic import PrecisionError
from .quatalg import OrderContext


class EquivalenceError(RuntimeError):
    """A lattice-positive answer failed verification on the tree."""


def iota4(ctx: OrderContext, x) -> tuple:
    (a, b), (c, d) = ctx.iota(x)
    return (a, b, c, d)


def _sign_normal(x):
    for c in x:
        if c:
            return tuple(x) if c > 0 else tuple(-t for t in x)
    return tuple(x)


@dataclass(frozen=True)
class GammaElement:
    """gamma = iota(x) / p^m with x in R and nrd(x) = p^(2m); stored modulo +-1."""

    x: tuple
    m: int

    @classmethod
    def make(cls, ctx: OrderContext, x, m: int) -> "GammaElement":
        x = list(x)
        p = ctx.p
        while m > 0 and all(c % p == 0 for c in x):
            x = [c // p for c in x]
            m -= 1
        if ctx.nrd(x) != p ** (2 * m):
            raise ValueError(f"nrd({x}) != {p}^{2 * m}")
        return cls(_sign_normal(x), m)

    @classmethod
    def identity(cls, ctx: OrderContext) -> "GammaElement":
        return cls(_sign_normal(ctx.one), 0)

    def matrix(self, ctx: OrderContext) -> tuple:
        """iota(x) mod p^prec; the scalar p^-m is dropped (it acts trivially on the tree)."""
        return iota4(ctx, self.x)

    def __mul__(self, other):
        raise TypeError("use GammaElement.compose(ctx, other)")

    def compose(self, ctx: OrderContext, other: "GammaElement") -> "GammaElement":
        return GammaElement.make(ctx, ctx.mul(self.x, other.x), self.m + other.m)

    def inverse(self, ctx: OrderContext) -> "GammaElement":
        return GammaElement(_sign_normal(ctx.conj(self.x)), self.m)

    def is_identity(self, ctx: OrderContext) -> bool:
        return self.m == 0 and self.x == _sign_normal(ctx.one)

    def act(self, ctx: OrderContext, sigma, edge: bool):
        prec = ctx.prec
        g = bt.mat_mul(self.matrix(ctx), sigma, ctx.p**prec)
        if edge:
            return bt.normalize_edge(g, ctx.p, prec)
        return bt.normalize_vertex(g, ctx.p, prec)

    def to_json(self):
        return {"x": list(self.x), "m": self.m}


@dataclass(frozen=True)
class EquivLattice:
    basis: tuple  # rows, in order coordinates
    m: int
    gram: tuple  # 2 * nrd form in this basis
    edge: bool


def half_distance2(u, v, p) -> int:
    return bt.vp(bt.det(u), p) + bt.vp(bt.det(v), p)


def build_lattice(u, v, ctx: OrderContext, edge: bool = False) -> EquivLattice | None:
    """The equivalence lattice of (u, v), or None when the parity rules out equivalence."""
    p = ctx.p
    two_m = half_distance2(u, v, p)
    if two_m % 2:
        return None
    m = two_m // 2
    if ctx.prec < two_m + 2:
        raise PrecisionError(f"splitting precision {ctx.prec} too low for half-distance {m}")
    mod = p ** (two_m + 1)
    vs = bt.adjugate(v)
    imgs = []
    for k in range(4):
        e = [0, 0, 0, 0]
        e[k] = 1
        imgs.append(bt.mat_mul(bt.mat_mul(vs, iota4(ctx, e), mod), u, mod))
    constraints = []
    for idx in range(4):
        exp_ = two_m + 1 if (edge and idx == 2) else two_m
        constraints.append(([imgs[k][idx] for k in range(4)], exp_))
    ident = [[int(i == j) for j in range(4)] for i in range(4)]
    basis = congruence_sublattice(ident, constraints, p)
    G = gram(basis, ctx.trace_gram)
    return EquivLattice(tuple(map(tuple, basis)), m, tuple(map(tuple, G)), edge)


def lattice_vectors_of_norm(L: EquivLattice, ctx: OrderContext) -> list[tuple]:
    """Order coordinates of the lattice vectors with nrd = p^(2m), up to sign, sorted."""
    target = 2 * ctx.p ** (2 * L.m)
    ys = short_vectors([list(r) for r in L.gram], target)
    out = []
    for y in ys:
        x = [sum(y[i] * L.basis[i][j] for i in range(4)) for j in range(4)]
        if ctx.nrd(x) == target // 2:
            out.append(_sign_normal(x))
    return sorted(set(out))


def equivalences(u, v, ctx: OrderContext, edge: bool = False) -> list[GammaElement]:
    """All gamma (mod +-1) with gamma u = v, each verified on the tree."""
    L = build_lattice(u, v, ctx, edge)
    if L is None:
        return []
    out = []
    for x in lattice_vectors_of_norm(L, ctx):
        g = GammaElement.make(ctx, x, L.m)
        if g.act(ctx, u, edge) != v:
            raise EquivalenceError(f"lattice vector {x} does not map {u} to {v}; splitting precision too low?")
        out.append(g)
    return out


def are_equivalent(u, v, ctx: OrderContext, edge: bool = False) -> GammaElement | None:
    """A witness gamma with gamma u = v (lexicographically least vector) or None."""
    L = build_lattice(u, v, ctx, edge)
    if L is None:
        return None
    vecs = lattice_vectors_of_norm(L, ctx)
    if not vecs:
        return None
    g = GammaElement.make(ctx, vecs[0], L.m)
    if g.act(ctx, u, edge) != v:
        raise EquivalenceError(f"witness {vecs[0]} does not map {u} to {v}")
    return g


def stabilizer(sigma, ctx: OrderContext, edge: bool = False) -> list[GammaElement]:
    """Stab_Gamma(sigma) modulo +-1; the identity class comes first."""
    els = equivalences(sigma, sigma, ctx, edge)
    one = GammaElement.identity(ctx)
    return [one] + [g for g in els if g != one]


def elements_of_norm(ctx: OrderContext, norm: int) -> list[tuple]:
    """All x in R (up to sign) with nrd(x) = norm."""
    ident = [[int(i == j) for j in range(4)] for i in range(4)]
    G = gram(ident, ctx.trace_gram)
    return [tuple(x) for x in short_vectors(G, 2 * norm) if ctx.nrd(x) == norm]
