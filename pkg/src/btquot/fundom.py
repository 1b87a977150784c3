"""Fundamental domains for Gamma acting on the Bruhat-Tits tree.

The domain is grown breadth-first from v0.  Alongside the accepted edges we
keep, for every domain vertex w, a table sending each of the p+1 edges at w
to one of the 2E ordered representatives together with the element of Gamma
realising the identification; lookups of arbitrary edges reduce to one vertex
equivalence test followed by a table hit.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from . import bttree as bt
from .arithgroup import GammaElement, are_equivalent, stabilizer
from .quatalg import OrderContext, kronecker, prime_factors


class DomainError(RuntimeError):
    pass


# --- genus ---------------------------------------------------------------


def genus_ogg(p: int, Nminus: int, Nplus: int) -> int:
    """Ogg's genus formula for the Shimura curve X0(p N-, N+)."""
    D = p * Nminus
    mu = Fraction(D * Nplus, 12)
    for q in prime_factors(D):
        mu *= 1 - Fraction(1, q)
    for q in prime_factors(Nplus):
        mu *= 1 + Fraction(1, q)

    def e(k):
        out = 1
        for q in prime_factors(D):
            out *= 1 - kronecker(-k, q)
        for q in prime_factors(Nplus):
            if Nplus % (q * q):
                out *= 1 + kronecker(-k, q)
            else:
                out *= 2 if kronecker(-k, q) == 1 else 0
        return out

    g = 1 + mu - Fraction(e(3), 3) - Fraction(e(4), 4)
    if g.denominator != 1 or g < 0:
        raise ValueError(f"Ogg formula gives {g} for ({p}, {Nminus}, {Nplus}): invalid level data")
    return int(g)


# --- the domain ------------------------------------------------------------


@dataclass
class FundamentalDomain:
    ctx: OrderContext
    vertices: list  # domain vertices, BFS order
    accepted: list  # one ordered edge per unordered orbit, as accepted by the BFS
    pairings: list  # (u, v, gamma) with gamma u = v
    vertex_stabilizers: dict
    tables: dict  # vertex -> {edge at vertex: (rep index, gamma with gamma*edge = rep)}
    reps: list = field(default_factory=list)  # ordered reps; 2i positive, 2i+1 its opposite
    edge_stabilizers: list = field(default_factory=list)  # per unordered orbit
    lattice_tests: int = 0

    @property
    def p(self):
        return self.ctx.p

    @property
    def V(self):
        return len(self.vertices)

    @property
    def E(self):
        return len(self.accepted)

    def genus(self):
        return 1 - self.V + self.E

    def rep_index(self, e):
        return self._rep_pos[e]

    def positive_reps(self):
        return self.reps[0::2]

    # lookup -------------------------------------------------------------

    def lookup_vertex(self, v):
        """(domain vertex w, gamma) with gamma v = w."""
        v = tuple(v)
        if v in self._vertex_pos:
            return bt.Vertex(*v), GammaElement.identity(self.ctx)
        par = bt.parity(v, self.p)
        for w in self.vertices:
            if bt.parity(w, self.p) != par:
                continue
            g = are_equivalent(bt.Vertex(*v), w, self.ctx)
            self.lattice_tests += 1
            if g is not None:
                return w, g
        raise DomainError(f"vertex {v} is not equivalent to any domain vertex")

    def lookup_edge(self, e):
        """(rep index i, gamma) with gamma e = reps[i]."""
        e = bt.Edge(*e)
        hit = self._direct.get(e)
        if hit is not None:
            return hit
        o = bt.origin(e, self.p)
        w, g = self.lookup_vertex(o)
        ge = g.act(self.ctx, e, True)
        idx, h = self.tables[w][ge]
        return idx, h.compose(self.ctx, g)

    def lookup(self, sigma, edge: bool = True):
        if edge:
            i, g = self.lookup_edge(sigma)
            return self.reps[i], g
        return self.lookup_vertex(sigma)

    def _index(self):
        self._vertex_pos = {tuple(v): i for i, v in enumerate(self.vertices)}
        self._rep_pos = {e: i for i, e in enumerate(self.reps)}
        self._direct = {}
        for w, tab in self.tables.items():
            for e, val in tab.items():
                self._direct.setdefault(e, val)

    # quotient -------------------------------------------------------------

    def quotient_edges(self):
        """Unordered quotient edges as pairs of domain-vertex indices, one per orbit."""
        out = []
        for i in range(self.E):
            e = self.reps[2 * i]
            a, _ = self.lookup_vertex(bt.origin(e, self.p))
            b, _ = self.lookup_vertex(bt.terminus(e, self.p))
            out.append((self._vertex_pos[tuple(a)], self._vertex_pos[tuple(b)]))
        return out


def _parity(x, p):
    return bt.parity(x, p)


def compute_fundamental_domain(ctx: OrderContext, reverse: bool = False, max_edges: int | None = None) -> FundamentalDomain:
    """Breadth-first fundamental domain with boundary pairings.

    ``reverse`` iterates the edges at each vertex in the opposite order; the
    resulting domain differs but the quotient does not.
    """
    p = ctx.p
    if max_edges is None:
        max_edges = 10 * (p + 1) * (genus_ogg(p, ctx.Nminus, ctx.Nplus) + 2)
    one = GammaElement.identity(ctx)
    v0 = bt.V0
    queue = deque([v0])
    vertices = [v0]
    accepted = []
    pairings = []
    stabs = {}
    known = {v0: []}  # vertex -> list of (edge at vertex, accepted-orbit index, orientation, gamma: edge -> that)
    tests = 0

    def acts(g, e):
        return g.act(ctx, e, True)

    while queue:
        v = queue.popleft()
        st = stabilizer(v, ctx)
        tests += 1
        stabs[v] = st
        edges = bt.edges_out(v, p)
        if reverse:
            edges = edges[::-1]
        for e in edges:
            if _find_known(ctx, st, known[v], e, acts) is not None:
                continue
            idx = len(accepted)
            accepted.append(e)
            if len(accepted) > max_edges:
                raise DomainError("edge count exceeds the guard; splitting precision or fixture is faulty")
            known[v].append((e, idx, 0, one))
            t = bt.terminus(e, p)
            eb = bt.opposite(e, p)
            partner = None
            for w in vertices:
                if _parity(w, p) != _parity(t, p):
                    continue
                tests += 1
                g = are_equivalent(t, w, ctx)
                if g is not None:
                    partner = (w, g)
                    break
            if partner is None:
                vertices.append(t)
                queue.append(t)
                known[t] = [(eb, idx, 1, one)]
            else:
                w, g = partner
                pairings.append((t, w, g))
                # g*eb sits at w and is identified with eb by g^-1
                known[w].append((acts(g, eb), idx, 1, g.inverse(ctx)))

    D = FundamentalDomain(ctx, vertices, accepted, pairings, stabs, {}, lattice_tests=tests)
    _finish(D, known)
    return D


def _find_known(ctx, st, known_list, e, acts):
    """(entry, s) with s * entry_edge = e for some stabilizer element s, or None."""
    by_edge = {k[0]: k for k in known_list}
    if e in by_edge:
        return by_edge[e], st[0]
    if len(st) == 1:
        return None
    for s in st[1:]:
        # s k = e  <=>  k = s^-1 e
        k = acts(s.inverse(ctx), e)
        if k in by_edge:
            return by_edge[k], s
    return None


def _finish(D: FundamentalDomain, known):
    ctx, p = D.ctx, D.p
    reps = []
    orient = []  # for accepted index i: which of (a, abar) is positive
    for a in D.accepted:
        ab = bt.opposite(a, p)
        if _parity(a, p) == 0:
            reps += [a, ab]
            orient.append(0)
        else:
            reps += [ab, a]
            orient.append(1)
    D.reps = reps
    tables = {}
    for w in D.vertices:
        st = D.vertex_stabilizers[w]
        tab = {}
        for e in bt.edges_out(w, p):
            hit = _find_known(ctx, st, known[w], e, lambda g, x: g.act(ctx, x, True))
            if hit is None:
                raise DomainError(f"edge {e} at {w} is not identified with any representative")
            (k_edge, idx, which, g), s = hit
            # g * k_edge = (a or abar); s * k_edge = e  =>  (g s^-1) e = rep
            rep_i = 2 * idx + (which ^ orient[idx])
            gamma = g.compose(ctx, s.inverse(ctx))
            tab[e] = (rep_i, gamma)
        tables[w] = tab
    D.tables = tables
    D._index()
    D.edge_stabilizers = [stabilizer(D.reps[2 * i], ctx, edge=True) for i in range(D.E)]


# --- quotient graph ------------------------------------------------------------


@dataclass
class QuotientGraph:
    vertices: list
    edges: list  # (i, j) pairs, with multiplicity

    @property
    def genus(self):
        return 1 - len(self.vertices) + len(self.edges)

    def is_regular(self, degree):
        deg = [0] * len(self.vertices)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return all(d == degree for d in deg)

    def has_loops(self):
        return any(i == j for i, j in self.edges)


def quotient_graph(D: FundamentalDomain) -> QuotientGraph:
    return QuotientGraph([tuple(v) for v in D.vertices], D.quotient_edges())


def export_dot(obj, name="quotient") -> str:
    """DOT text for a quotient graph or a fundamental domain (deterministic)."""
    lines = [f"graph {name} {{"]
    if isinstance(obj, FundamentalDomain):
        p = obj.p
        nodes = {}
        for v in obj.vertices:
            nodes[tuple(v)] = f"v{len(nodes)}"
        for a in obj.accepted:
            for x in (bt.origin(a, p), bt.terminus(a, p)):
                if tuple(x) not in nodes:
                    nodes[tuple(x)] = f"b{len(nodes)}"
        for key, label in nodes.items():
            style = "" if label.startswith("v") else ", style=dashed"
            lines.append(f'  {label} [label="{key}"{style}];')
        for a in obj.accepted:
            lines.append(f"  {nodes[tuple(bt.origin(a, p))]} -- {nodes[tuple(bt.terminus(a, p))]};")
    else:
        for i, v in enumerate(obj.vertices):
            lines.append(f'  v{i} [label="{tuple(v)}"];')
        for i, j in obj.edges:
            lines.append(f"  v{i} -- v{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def parse_dot_multigraph(text: str):
    """Minimal reader for the DOT produced by export_dot: (node names, edge list)."""
    nodes, edges = [], []
    for line in text.splitlines():
        line = line.strip().rstrip(";")
        if " -- " in line:
            a, b = (s.strip() for s in line.split(" -- "))
            edges.append((a, b))
        elif "[" in line and not line.startswith("graph"):
            nodes.append(line.split("[")[0].strip())
    return nodes, edges


def schottky_counts(p: int, g: int):
    """(V, E) predicted for a Schottky quotient of genus g."""
    if (2 * (g - 1)) % (p - 1):
        return None
    return 2 * (g - 1) // (p - 1), (p + 1) * (g - 1) // (p - 1)


def domain_summary(D: FundamentalDomain) -> dict:
    return {
        "p": D.p,
        "V": D.V,
        "E": D.E,
        "genus": D.genus(),
        "ogg": genus_ogg(D.p, D.ctx.Nminus, D.ctx.Nplus),
        "stabilizer_orders": {str(tuple(v)): len(s) for v, s in D.vertex_stabilizers.items()},
        "lattice_tests": D.lattice_tests,
    }

