"""Exact arithmetic in a quadratic field Q(sqrt d) and its ring of integers.

Elements are written in the integral basis {1, w} where w = sqrt(d), or
w = (1 + sqrt(d))/2 when d = 1 mod 4.  Everything is integer arithmetic;
the real embedding sends sqrt(d) to the positive root.
"""
from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from math import gcd, isqrt

from .errors import FieldError, SignatureError


def square_factor(n):
    """Smallest p with p*p | n, or None if n is square-free."""
    n = abs(n)
    if n % 4 == 0:
        return 2
    p = 3
    while p * p <= n:
        if n % (p * p) == 0:
            return p
        p += 2
    return None


def surd_sign(u, v, d):
    """Sign of u + v*sqrt(d) for d > 0 not a square."""
    if u >= 0 and v >= 0:
        return 1 if (u or v) else 0
    if u <= 0 and v <= 0:
        return -1
    # opposite signs: compare u^2 with v^2 d
    diff = u * u - v * v * d
    return (1 if u > 0 else -1) if diff > 0 else (1 if v > 0 else -1)


class QuadraticField:
    def __init__(self, d):
        d = int(d)
        if d in (0, 1):
            raise FieldError(f"d={d} does not give a quadratic field")
        sq = square_factor(d)
        if sq is not None:
            raise FieldError(f"d={d} is not square-free: divisible by {sq}^2")
        self.d = d
        if d % 4 == 1:
            self.T, self.N0, self.disc = 1, (d - 1) // 4, d
        else:
            self.T, self.N0, self.disc = 0, d, 4 * d
        # w^2 = T*w + N0

    @property
    def is_real(self):
        return self.d > 0

    @property
    def signature(self):
        return "real" if self.d > 0 else "imaginary"

    @property
    def omega_str(self):
        r = f"sqrt({self.d})"
        return f"(1+{r})/2" if self.T else r

    def __eq__(self, other):
        return isinstance(other, QuadraticField) and other.d == self.d

    def __hash__(self):
        return hash(("QuadraticField", self.d))

    def __repr__(self):
        return f"QuadraticField({self.d})"

    def __call__(self, a=0, b=0, den=1):
        return QuadNumber(self, a, b, den)

    @cached_property
    def one(self):
        return QuadNumber(self, 1, 0)

    @cached_property
    def zero(self):
        return QuadNumber(self, 0, 0)

    @cached_property
    def omega(self):
        return QuadNumber(self, 0, 1)

    def from_surd(self, u, v, w=1):
        """The element (u + v*sqrt(d))/w."""
        if self.T:
            # sqrt(d) = 2w - 1
            return QuadNumber(self, u - v, 2 * v, w)
        return QuadNumber(self, u, v, w)

    @cached_property
    def torsion_units(self):
        """Roots of unity, listed as successive powers of a primitive one."""
        if self.d == -1:
            z = self.omega
        elif self.d == -3:
            z = self.omega
        else:
            return (self.one, -self.one)
        out = [self.one]
        while True:
            nxt = out[-1] * z
            if nxt == self.one:
                return tuple(out)
            out.append(nxt)

    @property
    def torsion_generator(self):
        t = self.torsion_units
        return t[1]

    @cached_property
    def fundamental_unit(self):
        if not self.is_real:
            raise SignatureError(f"Q(sqrt({self.d})) is imaginary: no fundamental unit")
        return _fundamental_unit_cf(self)

    @cached_property
    def unit_bound(self):
        """An integer E >= fundamental unit (real embedding)."""
        u, v, w = self.fundamental_unit.surd()
        return -(-(u + isqrt(v * v * self.d) + 1) // w)

    @property
    def unit_generators(self):
        if self.is_real:
            return (self.torsion_generator, self.fundamental_unit)
        return (self.torsion_generator,)


def make_field(d):
    return QuadraticField(d)


class QuadNumber:
    """(a + b*w)/den with den > 0 and gcd(a, b, den) = 1."""

    __slots__ = ("F", "a", "b", "den")

    def __init__(self, F, a, b=0, den=1):
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            a, b, den = -a, -b, -den
        g = gcd(gcd(a, b), den)
        if g > 1:
            a, b, den = a // g, b // g, den // g
        self.F, self.a, self.b, self.den = F, a, b, den

    def __getstate__(self):
        return (self.F, self.a, self.b, self.den)

    def __setstate__(self, st):
        self.F, self.a, self.b, self.den = st

    def _coerce(self, other):
        if isinstance(other, QuadNumber):
            return other
        if isinstance(other, int):
            return QuadNumber(self.F, other, 0)
        if isinstance(other, Fraction):
            return QuadNumber(self.F, other.numerator, 0, other.denominator)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadNumber(self.F, self.a * o.den + o.a * self.den,
                          self.b * o.den + o.b * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return QuadNumber(self.F, -self.a, -self.b, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        F = self.F
        a1, b1, a2, b2 = self.a, self.b, o.a, o.b
        bb = b1 * b2
        return QuadNumber(F, a1 * a2 + F.N0 * bb, a1 * b2 + a2 * b1 + F.T * bb,
                          self.den * o.den)

    __rmul__ = __mul__

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return self.conj() * Fraction(1) / n

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            return QuadNumber(self.F, self.a * other.denominator, self.b * other.denominator,
                              self.den * other.numerator)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        result, base = self.F.one, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self):
        return QuadNumber(self.F, self.a + self.F.T * self.b, -self.b, self.den)

    def norm_numerator(self):
        a, b, F = self.a, self.b, self.F
        return a * a + F.T * a * b - F.N0 * b * b

    def norm(self):
        n = Fraction(self.norm_numerator(), self.den * self.den)
        return n.numerator if n.denominator == 1 else n

    def trace(self):
        return Fraction(2 * self.a + self.F.T * self.b, self.den)

    @property
    def is_integral(self):
        return self.den == 1

    def is_zero(self):
        return self.a == 0 and self.b == 0

    def surd(self):
        """(u, v, w) with self = (u + v*sqrt(d))/w, w > 0."""
        if self.F.T:
            return (2 * self.a + self.b, self.b, 2 * self.den)
        return (self.a, self.b, self.den)

    def sign(self):
        """Sign of the real embedding (real fields only)."""
        u, v, _ = self.surd()
        return surd_sign(u, v, self.F.d)

    def __float__(self):
        u, v, w = self.surd()
        if self.F.d < 0:
            raise TypeError("imaginary element has no real value")
        return (u + v * self.F.d ** 0.5) / w

    def __complex__(self):
        u, v, w = self.surd()
        return complex(u / w, v * abs(self.F.d) ** 0.5 / w) if self.F.d < 0 else complex(float(self))

    def __eq__(self, other):
        if isinstance(other, int):
            return self.b == 0 and self.den == 1 and self.a == other
        if isinstance(other, Fraction):
            return self.b == 0 and Fraction(self.a, self.den) == other
        if not isinstance(other, QuadNumber):
            return NotImplemented
        return (self.a, self.b, self.den) == (other.a, other.b, other.den) and self.F == other.F

    def __hash__(self):
        return hash((self.F.d, self.a, self.b, self.den))

    def __bool__(self):
        return not self.is_zero()

    def as_tuple(self):
        return (self.a, self.b, self.den)

    def __repr__(self):
        w = "w"
        if self.b == 0:
            s = str(self.a)
        elif self.a == 0:
            s = f"{self.b}*{w}"
        else:
            s = f"{self.a}{'+' if self.b > 0 else '-'}{abs(self.b)}*{w}"
        return s if self.den == 1 else f"({s})/{self.den}"

    def pretty(self):
        """Human form in terms of sqrt(d)."""
        u, v, w = self.surd()
        r = f"sqrt({self.F.d})"
        if v == 0:
            s = str(u)
        elif u == 0:
            s = f"{v}*{r}" if v not in (1, -1) else ("" if v == 1 else "-") + r
        else:
            vv = "" if abs(v) == 1 else f"{abs(v)}*"
            s = f"{u}{'+' if v > 0 else '-'}{vv}{r}"
        return s if w == 1 else f"({s})/{w}"


def norm(x, F=None):
    return x.norm()


def fundamental_unit(F):
    return F.fundamental_unit


def torsion_units(F):
    return list(F.torsion_units)


def _fundamental_unit_cf(F):
    """First unit among the continued-fraction convergents of w."""
    d = F.d
    # w = (P + sqrt(D))/Q
    P, Q, D = (1, 2, d) if F.T else (0, 1, d)
    s = isqrt(D)
    p0, p1 = 0, 1
    q0, q1 = 1, 0
    for _ in range(10 * d + 100):
        a = (P + s) // Q
        p0, p1 = p1, a * p1 + p0
        q0, q1 = q1, a * q1 + q0
        # p - q*w' = (p - q*T) + q*w is large and its conjugate small
        cand = QuadNumber(F, p1 - q1 * F.T, q1)
        if q1 > 0 and cand.norm() in (1, -1):
            return cand
        P = a * Q - P
        Q = (D - P * P) // Q
    raise RuntimeError(f"continued fraction for d={d} did not close")


def unit_exponent(u):
    """(s, k) with u = s * eps^k, s a root of unity; real fields only."""
    F = u.F
    if u.norm() not in (1, -1) or not u.is_integral:
        raise ValueError(f"{u!r} is not a unit")
    eps = F.fundamental_unit
    eps_inv = eps.inverse()
    k = 0
    # |u| and |u'| : u "large" iff u*v > 0 in surd form
    while True:
        uu, vv, _ = u.surd()
        if vv == 0:
            return (u, k)
        if uu * vv > 0:
            u = u * eps_inv
            k += 1
        else:
            u = u * eps
            k -= 1
