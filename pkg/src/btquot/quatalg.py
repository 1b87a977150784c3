"""Definite quaternion algebras over Q, Eichler order fixtures and p-adic splittings.

Elements of an order are handled internally by their integer coordinates with
respect to the order's Z-basis; ``OrderContext.mul`` uses the integral
structure constants of that basis.  The splitting ``iota`` is stored as the
images of the four basis elements, 2x2 integer matrices modulo ``p**prec``.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from pathlib import Path

from .padic import PrecisionError, inv_mod, legendre, split_power

FIXTURE_VERSION = 1


class FixtureError(ValueError):
    """Base class for rejected order fixtures."""


class OrderClosureError(FixtureError):
    pass


class DiscriminantError(FixtureError):
    pass


class SplittingError(FixtureError):
    pass


# --- primes and symbols ---------------------------------------------------


def prime_factors(n: int) -> list[int]:
    n = abs(n)
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def factorization(n: int) -> dict[int, int]:
    out = {}
    for q in prime_factors(n):
        e = 0
        while n % q == 0:
            n //= q
            e += 1
        out[q] = e
    return out


def is_squarefree(n: int) -> bool:
    return all(e == 1 for e in factorization(n).values())


def _square_class_integer(x: Fraction) -> int:
    # x * denominator^2 is an integer in the same square class
    return x.numerator * x.denominator


def hilbert_symbol(a, b, ell) -> int:
    """Local Hilbert symbol (a, b)_ell; ``ell`` is a prime or ``"inf"``."""
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol of zero")
    if ell in ("inf", math.inf, -1, None):
        return -1 if (a < 0 and b < 0) else 1
    a, b = _square_class_integer(a), _square_class_integer(b)
    alpha, u = split_power(a, ell)
    beta, v = split_power(b, ell)
    if ell == 2:
        def eps(x):
            return ((x - 1) // 2) % 2

        def omega(x):
            return ((x * x - 1) // 8) % 2

        e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)
        return -1 if e % 2 else 1
    e = (alpha * beta * ((ell - 1) // 2)) % 2
    s = (-1) ** e
    if beta % 2:
        s *= legendre(u, ell)
    if alpha % 2:
        s *= legendre(v, ell)
    return s


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n) for n > 0."""
    if n == 1:
        return 1
    result = 1
    for q, e in factorization(n).items():
        if q == 2:
            if a % 2 == 0:
                s = 0
            else:
                s = 1 if a % 8 in (1, 7) else -1
        else:
            s = legendre(a, q)
        result *= s**e
    return result


# --- the algebra ------------------------------------------------------------


@dataclass(frozen=True)
class QuatAlgebra:
    """The algebra (a, b): i^2 = a, j^2 = b, ij = -ji = k."""

    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    def ramified_primes(self) -> list[int]:
        """Finite primes where (a, b) is ramified."""
        cands = set(prime_factors(_square_class_integer(self.a)))
        cands |= set(prime_factors(_square_class_integer(self.b)))
        cands.add(2)
        return sorted(q for q in cands if hilbert_symbol(self.a, self.b, q) == -1)

    def is_definite(self) -> bool:
        return hilbert_symbol(self.a, self.b, "inf") == -1

    def discriminant(self) -> int:
        return math.prod(self.ramified_primes())

    def element(self, *coords) -> "QuatElement":
        return QuatElement(self, tuple(Fraction(c) for c in coords))


@dataclass(frozen=True)
class QuatElement:
    """x0 + x1*i + x2*j + x3*k with rational coordinates."""

    algebra: QuatAlgebra
    coords: tuple

    def __mul__(self, other):
        if not isinstance(other, QuatElement):
            return QuatElement(self.algebra, tuple(c * Fraction(other) for c in self.coords))
        a, b = self.algebra.a, self.algebra.b
        x0, x1, x2, x3 = self.coords
        y0, y1, y2, y3 = other.coords
        return QuatElement(
            self.algebra,
            (
                x0 * y0 + a * x1 * y1 + b * x2 * y2 - a * b * x3 * y3,
                x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2,
                x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1,
                x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
            ),
        )

    __rmul__ = __mul__

    def __add__(self, other):
        return QuatElement(self.algebra, tuple(x + y for x, y in zip(self.coords, other.coords)))

    def __sub__(self, other):
        return QuatElement(self.algebra, tuple(x - y for x, y in zip(self.coords, other.coords)))

    def __neg__(self):
        return QuatElement(self.algebra, tuple(-x for x in self.coords))

    def conjugate(self):
        x0, x1, x2, x3 = self.coords
        return QuatElement(self.algebra, (x0, -x1, -x2, -x3))

    def reduced_norm(self) -> Fraction:
        a, b = self.algebra.a, self.algebra.b
        x0, x1, x2, x3 = self.coords
        return x0 * x0 - a * x1 * x1 - b * x2 * x2 + a * b * x3 * x3

    def reduced_trace(self) -> Fraction:
        return 2 * self.coords[0]

    def __eq__(self, other):
        return isinstance(other, QuatElement) and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        names = ("", "i", "j", "k")
        parts = [f"{c}{('*' + n) if n else ''}" for c, n in zip(self.coords, names) if c]
        return " + ".join(parts) or "0"


# --- integer linear algebra helpers ----------------------------------------


def _det(m):
    """Exact determinant (Fractions or ints) by cofactor-free elimination."""
    m = [[Fraction(x) for x in row] for row in m]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return det


def _inverse(m):
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        piv = next(r for r in range(c, n) if a[r][c] != 0)
        a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


def _mat2_mul(x, y, mod):
    (a, b), (c, d) = x
    (e, f), (g, h) = y
    return ((a * e + b * g) % mod, (a * f + b * h) % mod), ((c * e + d * g) % mod, (c * f + d * h) % mod)


def inverse_mod_matrix(m, mod, p):
    """Inverse of an integer square matrix modulo ``mod = p**k`` (unit determinant)."""
    n = len(m)
    a = [[x % mod for x in row] + [int(i == j) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] % p), None)
        if piv is None:
            raise PrecisionError("matrix is not invertible over Zp")
        a[c], a[piv] = a[piv], a[c]
        inv = inv_mod(a[c][c], mod)
        a[c] = [x * inv % mod for x in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [(x - f * y) % mod for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


# --- orders and splittings ---------------------------------------------------


@dataclass(frozen=True)
class SplittingMap:
    """Images under iota of the order basis, as 2x2 integer matrices mod p**prec."""

    p: int
    prec: int
    images: tuple

    def __call__(self, coords) -> tuple:
        """iota of the element with the given integer order coordinates."""
        mod = self.p**self.prec
        out = [[0, 0], [0, 0]]
        for c, m in zip(coords, self.images):
            if c:
                for r in range(2):
                    for s in range(2):
                        out[r][s] += c * m[r][s]
        return ((out[0][0] % mod, out[0][1] % mod), (out[1][0] % mod, out[1][1] % mod))


@dataclass(frozen=True)
class ApproxInverseSplitting:
    """A linear map M2(Qp) -> B_p approximating iota^{-1} to precision ``prec``.

    ``matrix[r]`` gives the order coordinates of the image of the r-th matrix
    unit (entries ordered (1,1), (1,2), (2,1), (2,2)).
    """

    p: int
    prec: int
    matrix: tuple

    def __call__(self, m) -> tuple:
        mod = self.p**self.prec
        flat = (m[0][0], m[0][1], m[1][0], m[1][1])
        return tuple(sum(flat[r] * self.matrix[r][k] for r in range(4)) % mod for k in range(4))


@dataclass(frozen=True, eq=False)
class OrderContext:
    """A validated Eichler Z-order R with a precision-tagged splitting at p.

    Gamma is the group of reduced-norm-one elements of R[1/p].
    """

    algebra: QuatAlgebra
    basis: tuple  # four QuatElements
    p: int
    Nminus: int
    Nplus: int
    mult_table: tuple = field(repr=False)  # mult_table[i][j] = coords of e_i e_j
    trace_gram: tuple = field(repr=False)  # trd(e_i conj(e_j))
    traces: tuple = field(repr=False)
    one: tuple = field(repr=False)
    splitting: SplittingMap | None = field(default=None, repr=False)
    source: str = ""
    digest: str = ""

    # coordinates ---------------------------------------------------------

    @property
    def basis_matrix(self):
        return [list(e.coords) for e in self.basis]

    def to_coords(self, x: QuatElement) -> tuple:
        inv = _inverse(self.basis_matrix)
        c = [sum(x.coords[r] * inv[r][k] for r in range(4)) for k in range(4)]
        return tuple(c)

    def to_element(self, coords) -> QuatElement:
        return QuatElement(
            self.algebra,
            tuple(sum(Fraction(coords[r]) * self.basis[r].coords[k] for r in range(4)) for k in range(4)),
        )

    def mul(self, x, y, mod: int | None = None) -> tuple:
        out = [0, 0, 0, 0]
        for i, xi in enumerate(x):
            if not xi:
                continue
            row = self.mult_table[i]
            for j, yj in enumerate(y):
                if not yj:
                    continue
                c = xi * yj
                t = row[j]
                for k in range(4):
                    out[k] += c * t[k]
        if mod is not None:
            return tuple(v % mod for v in out)
        return tuple(out)

    def nrd(self, x) -> int:
        g = self.trace_gram
        s = 0
        for i in range(4):
            if x[i]:
                s += x[i] * sum(g[i][j] * x[j] for j in range(4))
        return s // 2

    def trd(self, x) -> int:
        return sum(t * c for t, c in zip(self.traces, x))

    def conj(self, x) -> tuple:
        # conj(x) = trd(x) - x
        t = self.trd(x)
        return tuple(t * o - c for o, c in zip(self.one, x))

    def iota(self, x) -> tuple:
        if self.splitting is None:
            raise SplittingError("order has no splitting")
        return self.splitting(x)

    @property
    def prec(self) -> int:
        return self.splitting.prec if self.splitting else 0

    def with_precision(self, prec: int) -> "OrderContext":
        """Same order with the splitting recomputed to ``prec`` digits."""
        ctx = OrderContext(**{**self.__dict__, "splitting": None})
        s = split_at_p(ctx, prec)
        return OrderContext(**{**self.__dict__, "splitting": s})

    def level_string(self) -> str:
        return f"({self.p},{self.Nminus},{self.Nplus})"


def _structure(algebra, basis):
    inv = _inverse([list(e.coords) for e in basis])

    def coords(x):
        return [sum(x.coords[r] * inv[r][k] for r in range(4)) for k in range(4)]

    table = []
    for ei in basis:
        row = []
        for ej in basis:
            c = coords(ei * ej)
            if any(v.denominator != 1 for v in c):
                raise OrderClosureError(f"basis product {ei} * {ej} leaves the Z-span")
            row.append(tuple(int(v) for v in c))
        table.append(tuple(row))
    one = coords(algebra.element(1, 0, 0, 0))
    if any(v.denominator != 1 for v in one):
        raise OrderClosureError("1 is not in the Z-span of the basis")
    gram = []
    for ei in basis:
        gram.append(tuple(int((ei * ej.conjugate()).reduced_trace()) for ej in basis))
    traces = tuple(int(e.reduced_trace()) for e in basis)
    return tuple(table), tuple(gram), traces, tuple(int(v) for v in one)


def make_order(algebra, basis, p, Nminus, Nplus, splitting_prec=None, source="", digest="") -> OrderContext:
    """Validate an order basis and (optionally) attach a splitting."""
    if any(x.algebra != algebra for x in basis) or len(basis) != 4:
        raise FixtureError("basis must consist of four elements of the algebra")
    if _det([list(e.coords) for e in basis]) == 0:
        raise FixtureError("basis is linearly dependent")
    if not algebra.is_definite():
        raise FixtureError("algebra is not definite")
    if not is_squarefree(Nminus) or len(prime_factors(Nminus)) % 2 == 0:
        raise DiscriminantError("N- must be squarefree with an odd number of prime factors")
    if math.gcd(Nminus, Nplus) != 1 or (Nminus * Nplus) % p == 0:
        raise FixtureError("level data must be pairwise coprime to p and each other")
    if algebra.ramified_primes() != prime_factors(Nminus):
        raise DiscriminantError(
            f"ramified primes {algebra.ramified_primes()} do not match N- = {Nminus}"
        )
    for x in basis:
        if x.reduced_norm().denominator != 1 or x.reduced_trace().denominator != 1:
            raise OrderClosureError(f"basis element {x} is not integral")
    table, gram, traces, one = _structure(algebra, basis)
    disc = _det(gram)
    if disc != (Nminus * Nplus) ** 2:
        raise DiscriminantError(f"trace-form discriminant {disc} != (N- N+)^2 = {(Nminus * Nplus) ** 2}")
    ctx = OrderContext(algebra, tuple(basis), p, Nminus, Nplus, table, gram, traces, one, None, source, digest)
    if splitting_prec:
        ctx = OrderContext(**{**ctx.__dict__, "splitting": split_at_p(ctx, splitting_prec)})
    return ctx


# --- splitting -------------------------------------------------------------


def _first_unit_index(v, p):
    for k, c in enumerate(v):
        if c % p:
            return k
    return None


def split_at_p(ctx: OrderContext, prec: int) -> SplittingMap:
    """Build iota: R_p -> M2(Zp) from a lifted idempotent and matrix units.

    Works for every p unramified in B, including p = 2.  The result is
    deterministic in (ctx, prec) and checked before it is returned.
    """
    p = ctx.p
    mod = p**prec
    one = ctx.one
    # a nonzero element of reduced norm 0 mod p
    zero_div = next((x for x in product(range(p), repeat=4) if any(x) and ctx.nrd(x) % p == 0), None)
    if zero_div is None:
        raise SplittingError(f"no zero divisor mod {p}: B is ramified at {p}?")
    x = zero_div
    if ctx.trd(x) % p == 0:
        for b in _basis_vectors():
            y = ctx.mul(x, b)
            if ctx.trd(y) % p:
                x = y
                break
    t = ctx.trd(x) % p
    if t == 0:
        raise SplittingError("could not produce an idempotent")
    ti = inv_mod(t, p)
    e = tuple(c * ti % p for c in x)
    # Newton lift of the idempotent: e <- 3e^2 - 2e^3
    k = 1
    while True:
        e2 = ctx.mul(e, e, mod)
        if all((a - b) % mod == 0 for a, b in zip(e2, e)):
            break
        e3 = ctx.mul(e2, e, mod)
        e = tuple((3 * a - 2 * b) % mod for a, b in zip(e2, e3))
        k += 1
        if k > 4 * prec + 10:
            raise SplittingError("idempotent lifting did not converge")
    f = tuple((o - c) % mod for o, c in zip(one, e))

    def sandwich(l, m, r):
        return ctx.mul(ctx.mul(l, m, mod), r, mod)

    e12 = e21 = None
    for b in _basis_vectors():
        y = sandwich(e, b, f)
        if e12 is None and _first_unit_index(y, p) is not None:
            e12 = y
        z = sandwich(f, b, e)
        if e21 is None and _first_unit_index(z, p) is not None:
            e21 = z
    if e12 is None or e21 is None:
        raise SplittingError("no matrix units found")
    prod_ = ctx.mul(e12, e21, mod)
    ke = _first_unit_index(e, p)
    c = prod_[ke] * inv_mod(e[ke], mod) % mod
    if c % p == 0:
        raise SplittingError("matrix units do not generate")
    ci = inv_mod(c, mod)
    e21 = tuple(v * ci % mod for v in e21)
    units = {(0, 0): e, (0, 1): e12, (1, 0): e21, (1, 1): f}
    idx = {key: _first_unit_index(v, p) for key, v in units.items()}
    images = []
    for b in _basis_vectors():
        m = [[0, 0], [0, 0]]
        for (r, s), u in units.items():
            left = e if r == 0 else f
            right = e if s == 0 else f
            y = sandwich(left, b, right)
            kk = idx[(r, s)]
            m[r][s] = y[kk] * inv_mod(u[kk], mod) % mod
        images.append(((m[0][0], m[0][1]), (m[1][0], m[1][1])))
    s = SplittingMap(p, prec, tuple(images))
    check_splitting(ctx, s)
    return s


def _basis_vectors():
    return [tuple(int(i == j) for j in range(4)) for i in range(4)]


def check_splitting(ctx: OrderContext, s: SplittingMap) -> None:
    """Verify ring-map, norm/determinant and Zp-spanning properties of ``s``."""
    p, mod = s.p, s.p**s.prec
    if s(ctx.one) != ((1, 0), (0, 1)):
        raise SplittingError("iota(1) is not the identity")
    for i in range(4):
        for j in range(4):
            lhs = _mat2_mul(s.images[i], s.images[j], mod)
            rhs = s(ctx.mult_table[i][j])
            if lhs != rhs:
                raise SplittingError(f"iota(e{i} e{j}) != iota(e{i}) iota(e{j}) mod {p}^{s.prec}")
    for i, b in enumerate(_basis_vectors()):
        (a, bb), (c, d) = s.images[i]
        if (a * d - bb * c - ctx.nrd(b)) % mod:
            raise SplittingError(f"det(iota(e{i})) != nrd(e{i})")
    flat = [[m[0][0], m[0][1], m[1][0], m[1][1]] for m in s.images]
    if _det(flat).numerator % p == 0:
        raise SplittingError("iota(R) does not span M2(Zp)")


def approx_inverse(ctx: OrderContext, n: int) -> ApproxInverseSplitting:
    """Inverse of iota on M2(Zp), truncated to precision n."""
    if ctx.splitting is None or n > ctx.splitting.prec:
        raise PrecisionError(f"requested precision {n} exceeds splitting precision {ctx.prec}")
    mod = ctx.p**n
    flat = [[m[0][0], m[0][1], m[1][0], m[1][1]] for m in ctx.splitting.images]
    inv = inverse_mod_matrix(flat, mod, ctx.p)
    return ApproxInverseSplitting(ctx.p, n, tuple(tuple(row) for row in inv))


# --- fixtures -----------------------------------------------------------------


def default_splitting_precision(p: int) -> int:
    """Digits of iota kept by default: room for half-distances up to ~20 edges at p = 2."""
    return max(80, int(120 / math.log2(p)) + 20)


def _frac(s) -> Fraction:
    return Fraction(str(s))


def load_order(path, splitting_prec: int | None = None) -> OrderContext:
    """Read and fully re-validate an order fixture (JSON)."""
    path = Path(path)
    raw = path.read_bytes()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise FixtureError(f"{path}: not valid JSON ({exc})") from exc
    return order_from_dict(data, splitting_prec, source=str(path), digest=hashlib.sha256(raw).hexdigest())


def order_from_dict(data: dict, splitting_prec: int | None = None, source="", digest="") -> OrderContext:
    try:
        if data.get("version", FIXTURE_VERSION) != FIXTURE_VERSION:
            raise FixtureError(f"unsupported fixture version {data.get('version')}")
        p, Nm, Np = int(data["p"]), int(data["Nminus"]), int(data["Nplus"])
        alg = QuatAlgebra(_frac(data["a"]), _frac(data["b"]))
        basis = [alg.element(*(_frac(c) for c in row)) for row in data["basis"]]
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, FixtureError):
            raise
        raise FixtureError(f"malformed fixture: {exc}") from exc
    ctx = make_order(alg, basis, p, Nm, Np, source=source, digest=digest)
    prec = splitting_prec or default_splitting_precision(p)
    stored = data.get("splitting")
    if stored and int(stored["precision"]) >= prec:
        mod = p**prec
        images = tuple(
            tuple(tuple(int(x) % mod for x in row) for row in m) for m in stored["images"]
        )
        s = SplittingMap(p, prec, images)
        check_splitting(ctx, s)
    else:
        s = split_at_p(ctx, prec)
    return OrderContext(**{**ctx.__dict__, "splitting": s})


def order_to_dict(ctx: OrderContext, include_splitting=True) -> dict:
    out = {
        "version": FIXTURE_VERSION,
        "p": ctx.p,
        "Nminus": ctx.Nminus,
        "Nplus": ctx.Nplus,
        "a": str(ctx.algebra.a),
        "b": str(ctx.algebra.b),
        "basis": [[str(c) for c in e.coords] for e in ctx.basis],
    }
    if include_splitting and ctx.splitting:
        out["splitting"] = {
            "precision": ctx.splitting.prec,
            "images": [[list(r) for r in m] for m in ctx.splitting.images],
        }
    return out


FIXTURE_DIR = Path(__file__).parent / "data" / "fixtures"


def bundled_fixture(name: str) -> Path:
    path = FIXTURE_DIR / (name if name.endswith(".json") else name + ".json")
    if not path.exists():
        raise FixtureError(f"no bundled fixture {name!r}")
    return path
