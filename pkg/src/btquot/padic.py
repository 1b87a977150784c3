"""Fixed-precision arithmetic over Qp and its unramified quadratic extension.

Every value carries its own absolute precision: a :class:`PadicNumber` is known
modulo ``p**prec`` and operations never fabricate digits.  The helpers at the
bottom of the module (``valuation``, ``inv_mod``, ``rational_reconstruct``) are
shared by the rest of the package, which mostly works with plain integers
reduced modulo a power of p for speed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt


class PrecisionError(ArithmeticError):
    """Raised when a computation needs more p-adic digits than are available."""


class NoSquareRoot(ValueError):
    pass


def valuation(x: int | Fraction, p: int) -> float | int:
    """p-adic valuation of a rational; ``inf`` for zero."""
    if isinstance(x, Fraction):
        if x == 0:
            return float("inf")
        return valuation(x.numerator, p) - valuation(x.denominator, p)
    if x == 0:
        return float("inf")
    v = 0
    x = abs(x)
    while x % p == 0:
        x //= p
        v += 1
    return v


def inv_mod(a: int, m: int) -> int:
    return pow(a, -1, m)


def split_power(x: int, p: int) -> tuple[int, int]:
    """Return (v, u) with x = p**v * u and p not dividing u; x nonzero."""
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v, x


@dataclass(frozen=True)
class PadicNumber:
    """The value ``p**val * unit`` known modulo ``p**prec``.

    For a nonzero number ``0 < unit < p**(prec - val)`` and ``gcd(unit, p) == 1``.
    Zero is stored with ``val == prec`` and ``unit == 0``.
    """

    p: int
    val: int
    unit: int
    prec: int

    def __post_init__(self):
        if self.unit == 0:
            if self.val != self.prec:
                raise ValueError("zero must have val == prec")
            return
        if self.prec <= self.val:
            raise ValueError("precision must exceed valuation for a nonzero value")
        if self.unit % self.p == 0 or not 0 < self.unit < self.p ** (self.prec - self.val):
            raise ValueError("unit part out of range")

    # construction -------------------------------------------------------

    @classmethod
    def zero(cls, p: int, prec: int) -> "PadicNumber":
        return cls(p, prec, 0, prec)

    @classmethod
    def from_rational(cls, p: int, x: int | Fraction | str, prec: int) -> "PadicNumber":
        """Embed a rational number, keeping digits below ``p**prec``."""
        x = Fraction(x)
        if x == 0:
            return cls.zero(p, prec)
        vn, un = split_power(x.numerator, p)
        vd, ud = split_power(x.denominator, p)
        v = vn - vd
        if v >= prec:
            return cls.zero(p, prec)
        mod = p ** (prec - v)
        return cls(p, v, un * inv_mod(ud, mod) % mod, prec)

    @classmethod
    def from_int_mod(cls, p: int, x: int, prec: int, shift: int = 0) -> "PadicNumber":
        """The number ``p**shift * x`` where ``x`` is known modulo ``p**prec``.

        The resulting absolute precision is ``prec + shift``.
        """
        x %= p**prec
        if x == 0:
            return cls.zero(p, prec + shift)
        v, u = split_power(x, p)
        return cls(p, v + shift, u % p ** (prec - v), prec + shift)

    # basic queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return self.unit == 0

    @property
    def relprec(self) -> int:
        return 0 if self.is_zero() else self.prec - self.val

    def valuation(self) -> int:
        return self.val

    def lift(self) -> Fraction:
        """Canonical rational representative ``p**val * unit``."""
        if self.is_zero():
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.val

    def residue(self, k: int) -> int:
        """Integer representative modulo ``p**k`` (requires k <= prec and val >= 0)."""
        if k > self.prec:
            raise PrecisionError(f"asked for {k} digits, only {self.prec} known")
        if self.is_zero():
            return 0
        if self.val < 0:
            raise ValueError("not integral")
        return self.unit * self.p**self.val % self.p**k

    def _check(self, other: "PadicNumber") -> "PadicNumber":
        if not isinstance(other, PadicNumber):
            # an exact operand must not limit the relative precision of a product
            x = Fraction(other)
            prec = max(self.prec, 1)
            if x:
                prec = max(prec, valuation(x, self.p) + max(self.relprec, 1))
            other = PadicNumber.from_rational(self.p, x, prec)
        if other.p != self.p:
            raise ValueError("mismatched primes")
        return other

    # arithmetic ---------------------------------------------------------

    def __neg__(self):
        if self.is_zero():
            return self
        mod = self.p ** (self.prec - self.val)
        return PadicNumber(self.p, self.val, (-self.unit) % mod, self.prec)

    def __add__(self, other):
        other = self._check(other)
        p = self.p
        prec = min(self.prec, other.prec)
        vmin = min(self.val, other.val, prec)
        if vmin >= prec:
            return PadicNumber.zero(p, prec)
        mod = p ** (prec - vmin)
        s = 0
        for x in (self, other):
            if not x.is_zero() and x.val < prec:
                s += x.unit * p ** (x.val - vmin)
        return PadicNumber.from_int_mod(p, s % mod, prec - vmin, vmin)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        p = self.p
        if self.is_zero() or other.is_zero():
            if self.is_zero() and other.is_zero():
                prec = self.prec + other.prec
            elif self.is_zero():
                prec = self.prec + other.val
            else:
                prec = other.prec + self.val
            return PadicNumber.zero(p, prec)
        rel = min(self.relprec, other.relprec)
        v = self.val + other.val
        mod = p**rel
        return PadicNumber(p, v, self.unit * other.unit % mod, v + rel)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._check(other)
        if other.is_zero():
            raise PrecisionError("division by a value indistinguishable from zero")
        p = self.p
        if self.is_zero():
            return PadicNumber.zero(p, self.prec - other.val)
        rel = min(self.relprec, other.relprec)
        v = self.val - other.val
        mod = p**rel
        return PadicNumber(p, v, self.unit * inv_mod(other.unit, mod) % mod, v + rel)

    def __rtruediv__(self, other):
        return self._check(other) / self

    def __pow__(self, n: int):
        if n == 0:
            return PadicNumber.from_rational(self.p, 1, max(self.relprec, self.prec, 1))
        base = self if n > 0 else 1 / self
        result = base
        for _ in range(abs(n) - 1):
            result = result * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PadicNumber.from_rational(self.p, other, self.prec)
        if not isinstance(other, PadicNumber) or other.p != self.p:
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash((self.p, self.val, self.unit, self.prec))

    def add_bigoh(self, prec: int) -> "PadicNumber":
        """Reduce to a lower absolute precision."""
        if prec >= self.prec:
            return self
        if self.is_zero() or self.val >= prec:
            return PadicNumber.zero(self.p, prec)
        return PadicNumber(self.p, self.val, self.unit % self.p ** (prec - self.val), prec)

    # serialization ------------------------------------------------------

    def to_string(self) -> str:
        """Format as ``"<unit>*<p>^<val> + O(<p>^<prec>)"``; zero is ``"O(<p>^<prec>)"``."""
        if self.is_zero():
            return f"O({self.p}^{self.prec})"
        return f"{self.unit}*{self.p}^{self.val} + O({self.p}^{self.prec})"

    _PATTERN = re.compile(r"^\s*(?:(\d+)\*(\d+)\^(-?\d+)\s*\+\s*)?O\((\d+)\^(-?\d+)\)\s*$")

    @classmethod
    def from_string(cls, s: str) -> "PadicNumber":
        m = cls._PATTERN.match(s)
        if not m:
            raise ValueError(f"cannot parse p-adic number {s!r}")
        unit, p1, val, p2, prec = m.groups()
        p = int(p2)
        if unit is None:
            return cls.zero(p, int(prec))
        if int(p1) != p:
            raise ValueError("inconsistent primes")
        return cls(p, int(val), int(unit), int(prec))

    def __repr__(self):
        return self.to_string()


def hensel_sqrt(a: PadicNumber) -> PadicNumber:
    """Square root of ``a`` for odd p.

    The unit part of the result is congruent to the smallest square root of
    the unit part of ``a`` modulo p.
    """
    p = a.p
    if p == 2:
        raise ValueError("hensel_sqrt requires an odd prime")
    if a.is_zero():
        return PadicNumber.zero(p, a.prec // 2)
    if a.val % 2:
        raise NoSquareRoot("odd valuation")
    u0 = a.unit % p
    roots = [r for r in range(1, p) if r * r % p == u0]
    if not roots:
        raise NoSquareRoot(f"{u0} is not a square mod {p}")
    r = roots[0]
    rel = a.relprec
    k = 1
    while k < rel:
        k = min(2 * k, rel)
        mod = p**k
        r = (r - (r * r - a.unit) * inv_mod(2 * r, mod)) % mod
    return PadicNumber(p, a.val // 2, r % p**rel, a.val // 2 + rel)


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def is_square_padic(a: PadicNumber) -> bool:
    """Square-class test in Qp^x (odd p needs one unit digit, p = 2 needs three)."""
    if a.is_zero():
        raise PrecisionError("zero has no square class")
    if a.val % 2:
        return False
    if a.p == 2:
        if a.relprec < 3:
            raise PrecisionError("need three 2-adic digits")
        return a.unit % 8 == 1
    return legendre(a.unit, a.p) == 1


def rational_reconstruct(x: PadicNumber, guard: int = 10) -> Fraction | None:
    """Recover a small rational a/b congruent to ``x``.

    Returns ``None`` when no pair with ``|a|, |b| <= p**((N - guard)/2)`` exists,
    where N is the relative precision of ``x``.
    """
    p = x.p
    if x.is_zero():
        return Fraction(0)
    n = x.relprec
    if n - guard < 1:
        return None
    m = p**n
    bound = isqrt(p ** (n - guard))
    r0, r1 = m, x.unit % m
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    a, b = r1, s1
    if b == 0 or abs(b) > bound or gcd(a, b) != 1 or b % p == 0:
        return None
    if b < 0:
        a, b = -a, -b
    return Fraction(a, b) * Fraction(p) ** x.val


# --- unramified quadratic extension -------------------------------------


def quadratic_generator(p: int) -> tuple[int, int]:
    """Return (t, s) with ``w**2 = t*w + s`` irreducible modulo p.

    For p = 2 this is the cube root of unity; for odd p, ``w`` is the square
    root of the least quadratic non-residue.
    """
    if p == 2:
        return -1, -1
    eps = next(e for e in range(2, p) if legendre(e, p) == -1)
    return 0, eps


@dataclass(frozen=True)
class PadicQuadElement:
    """``a + b*w`` in Qp(w), with ``w**2 = t*w + s`` fixed by :func:`quadratic_generator`."""

    a: PadicNumber
    b: PadicNumber

    @property
    def p(self) -> int:
        return self.a.p

    @classmethod
    def from_ints(cls, p: int, a, b, prec: int) -> "PadicQuadElement":
        return cls(PadicNumber.from_rational(p, a, prec), PadicNumber.from_rational(p, b, prec))

    @property
    def gen(self) -> tuple[int, int]:
        return quadratic_generator(self.p)

    def __add__(self, o):
        o = self._coerce(o)
        return PadicQuadElement(self.a + o.a, self.b + o.b)

    def __sub__(self, o):
        o = self._coerce(o)
        return PadicQuadElement(self.a - o.a, self.b - o.b)

    def __neg__(self):
        return PadicQuadElement(-self.a, -self.b)

    def __mul__(self, o):
        o = self._coerce(o)
        t, s = self.gen
        bb = self.b * o.b
        return PadicQuadElement(self.a * o.a + bb * s, self.a * o.b + self.b * o.a + bb * t)

    __rmul__ = __mul__
    __radd__ = __add__

    def conjugate(self):
        t, _ = self.gen
        return PadicQuadElement(self.a + self.b * t, -self.b)

    def norm(self) -> PadicNumber:
        t, s = self.gen
        return self.a * self.a + self.a * self.b * t - self.b * self.b * s

    def trace(self) -> PadicNumber:
        t, _ = self.gen
        return self.a * 2 + self.b * t

    def __truediv__(self, o):
        o = self._coerce(o)
        n = o.norm()
        c = self * o.conjugate()
        return PadicQuadElement(c.a / n, c.b / n)

    def valuation(self) -> int:
        return min(self.a.val, self.b.val)

    def in_base_field(self) -> bool:
        return self.b.is_zero()

    def _coerce(self, o):
        if isinstance(o, PadicQuadElement):
            return o
        if not isinstance(o, PadicNumber):
            o = PadicNumber.from_rational(self.p, o, max(self.a.prec, self.b.prec))
        return PadicQuadElement(o, PadicNumber.zero(self.p, o.prec))

    def __eq__(self, o):
        if not isinstance(o, (PadicQuadElement, PadicNumber, int, Fraction)):
            return NotImplemented
        d = self - self._coerce(o)
        return d.a.is_zero() and d.b.is_zero()

    def __hash__(self):
        return hash((self.a, self.b))

    def to_string(self) -> str:
        return f"({self.a.to_string()}) + ({self.b.to_string()})*w"

    def __repr__(self):
        return self.to_string()


_POINT = re.compile(r"^\s*([-+]?\d+(?:/\d+)?)\s*(?:([-+])\s*(\d+(?:/\d+)?)\s*\*\s*w)?\s*$")


def parse_point(text: str, p: int, prec: int) -> PadicQuadElement:
    """Parse ``"x0+x1*w"`` with rational coordinates ``x0``, ``x1``."""
    m = _POINT.match(text)
    if not m:
        raise ValueError(f"cannot parse point {text!r}; expected 'x0+x1*w'")
    x0, sign, x1 = m.groups()
    y = Fraction(x1) if x1 else Fraction(0)
    if sign == "-":
        y = -y
    return PadicQuadElement.from_ints(p, Fraction(x0), y, prec)
