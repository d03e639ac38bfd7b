"""Fractional ideals of a quadratic order, prime factorization and class groups.

An ideal is stored as scale * (Z*a + Z*(b + w)) with the primitive part in
Hermite normal form (a | Nm(b + w), 0 <= b < a) and a positive rational
scale.  The triple (a, b, scale) is unique, so equality is tuple equality.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt, lcm

from sympy import factorint, primerange
from sympy.ntheory import sqrt_mod

from .errors import NonCyclicClassGroup, NotPrincipal, PreconditionError
from .field import QuadNumber, QuadraticField
from .lattice import QuotientBox, hnf


class Ideal:
    __slots__ = ("F", "a", "b", "scale", "__weakref__")

    def __init__(self, F, a, b, scale=1):
        scale = Fraction(scale)
        if a <= 0 or scale <= 0 or not 0 <= b < a:
            raise ValueError(f"bad HNF ({a}, {b}, {scale})")
        self.F, self.a, self.b, self.scale = F, a, b, scale

    def __getstate__(self):
        return (self.F, self.a, self.b, self.scale)

    def __setstate__(self, st):
        self.F, self.a, self.b, self.scale = st

    @classmethod
    def unit(cls, F):
        return cls(F, 1, 0, 1)

    @classmethod
    def from_generators(cls, F, gens):
        gens = [g if isinstance(g, QuadNumber) else F(g) for g in gens]
        L = 1
        for g in gens:
            L = lcm(L, g.den)
        vecs = []
        for g in gens:
            m = L // g.den
            x, y = g.a * m, g.b * m
            # g*w = N0*y + (x + T*y) w
            vecs.append((x, y))
            vecs.append((F.N0 * y, x + F.T * y))
        A, B, D = hnf(vecs)
        if A % D or B % D:
            raise ValueError("generators do not span an ideal")
        a, b = A // D, B // D
        if (b * b + F.T * b - F.N0) % a:
            raise ValueError("generators do not span an ideal")
        return cls(F, a, b, Fraction(D, L))

    @classmethod
    def principal(cls, x):
        if x.is_zero():
            raise PreconditionError("zero ideal")
        return cls.from_generators(x.F, [x])

    @classmethod
    def from_hnf(cls, F, a, b, c=1, den=1):
        return cls(F, a, b, Fraction(c, den))

    # --- accessors -----------------------------------------------------
    @property
    def c(self):
        return self.scale.numerator

    @property
    def den(self):
        return self.scale.denominator

    @property
    def is_integral(self):
        return self.scale.denominator == 1

    @property
    def norm(self):
        n = self.a * self.scale * self.scale
        return n.numerator if n.denominator == 1 else n

    def basis(self):
        s = self.scale
        F = self.F
        return (QuadNumber(F, self.a * s.numerator, 0, s.denominator),
                QuadNumber(F, self.b * s.numerator, s.numerator, s.denominator))

    def key(self):
        return (self.a, self.b, self.scale.numerator, self.scale.denominator)

    def sort_key(self):
        return (self.norm, self.a, self.b, self.scale)

    def hnf_triple(self):
        if not self.is_integral:
            raise ValueError("not an integral ideal")
        return (self.a, self.b, self.c)

    def __eq__(self, other):
        if not isinstance(other, Ideal):
            return NotImplemented
        return self.key() == other.key() and self.F == other.F

    def __hash__(self):
        return hash((self.F.d,) + self.key())

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __repr__(self):
        s = f"[{self.a}, {self.b}]"
        if self.scale != 1:
            s = f"{self.scale}*{s}"
        return f"Ideal({s})"

    # --- membership ----------------------------------------------------
    def coords(self, x):
        """Rational coordinates of x in the Z-basis of this ideal."""
        s = self.scale
        yb = Fraction(x.b, x.den) / s
        xa = Fraction(x.a, x.den) / s - yb * self.b
        return xa / self.a, yb

    def __contains__(self, x):
        if not isinstance(x, QuadNumber):
            x = self.F(x)
        k1, k2 = self.coords(x)
        return k1.denominator == 1 and k2.denominator == 1

    def issubset(self, other):
        return all(g in other for g in self.basis())

    # --- arithmetic ----------------------------------------------------
    def __mul__(self, other):
        if isinstance(other, QuadNumber):
            return Ideal.from_generators(self.F, [g * other for g in self.basis()])
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if other == 0:
                raise PreconditionError("zero ideal")
            return Ideal(self.F, self.a, self.b, self.scale * abs(other))
        b1, b2 = self.basis()
        c1, c2 = other.basis()
        return Ideal.from_generators(self.F, [b1 * c1, b1 * c2, b2 * c1, b2 * c2])

    __rmul__ = __mul__

    def __add__(self, other):
        return Ideal.from_generators(self.F, list(self.basis()) + list(other.basis()))

    def conj(self):
        return Ideal.from_generators(self.F, [g.conj() for g in self.basis()])

    def inverse(self):
        c = self.conj()
        return Ideal(self.F, c.a, c.b, c.scale / self.norm)

    def __truediv__(self, other):
        if isinstance(other, Ideal):
            return self * other.inverse()
        return self * (1 / Fraction(other))

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        result, base = Ideal.unit(self.F), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def primitive(self):
        return Ideal(self.F, self.a, self.b, 1)


def mul(I, J):
    return I * J


def inverse(I):
    return I.inverse()


# --- residue fields and prime ideals ------------------------------------

class PrimeIdeal(Ideal):
    __slots__ = ("p", "degree", "kind", "root")

    def __init__(self, F, a, b, scale, p, degree, kind, root=None):
        super().__init__(F, a, b, scale)
        self.p, self.degree, self.kind, self.root = p, degree, kind, root

    def __getstate__(self):
        return (self.F, self.a, self.b, self.scale, self.p, self.degree, self.kind, self.root)

    def __setstate__(self, st):
        self.F, self.a, self.b, self.scale, self.p, self.degree, self.kind, self.root = st

    # Nm(p) = p^degree
    @property
    def size(self):
        return self.p ** self.degree

    @property
    def split_type(self):
        return self.kind

    def __repr__(self):
        return f"PrimeIdeal(p={self.p}, {self.kind}, [{self.a}, {self.b}]{'' if self.scale == 1 else '*' + str(self.scale)})"

    def red(self, x):
        """Image of x in O/p.  x may carry a denominator prime to p."""
        p = self.p
        if x.den % p == 0:
            raise PreconditionError(f"{x!r} is not p-integral at {self!r}")
        dinv = pow(x.den, -1, p)
        if self.degree == 1:
            return (x.a + x.b * self.root) * dinv % p
        return (x.a * dinv % p, x.b * dinv % p)

    def rmul(self, s, t):
        p = self.p
        if self.degree == 1:
            return s * t % p
        a1, b1 = s
        a2, b2 = t
        F = self.F
        bb = b1 * b2
        return ((a1 * a2 + F.N0 * bb) % p, (a1 * b2 + a2 * b1 + F.T * bb) % p)

    @property
    def rone(self):
        return 1 if self.degree == 1 else (1, 0)

    @property
    def rzero(self):
        return 0 if self.degree == 1 else (0, 0)

    def rpow(self, s, k):
        if self.degree == 1:
            return pow(s, k, self.p)
        result = self.rone
        while k:
            if k & 1:
                result = self.rmul(result, s)
            s = self.rmul(s, s)
            k >>= 1
        return result

    def residues(self):
        p = self.p
        if self.degree == 1:
            return list(range(p))
        return [(u, v) for v in range(p) for u in range(p)]

    @property
    def group_factorization(self):
        """Factorization of |(O/p)^x| = Nm(p) - 1."""
        p = self.p
        if self.degree == 1:
            return factorint(p - 1)
        fac = dict(factorint(p - 1))
        for q, e in factorint(p + 1).items():
            fac[q] = fac.get(q, 0) + e
        return fac

    def rorder(self, s):
        if s == self.rzero:
            raise PreconditionError("zero has no multiplicative order")
        o = self.size - 1
        for q, e in self.group_factorization.items():
            for _ in range(e):
                if self.rpow(s, o // q) == self.rone:
                    o //= q
                else:
                    break
        return o


def _roots_mod(F, p):
    """Roots of w's minimal polynomial x^2 - T x - N0 modulo p."""
    if p == 2:
        return [r for r in (0, 1) if (r * r - F.T * r - F.N0) % 2 == 0]
    D = F.disc % p
    inv2 = (p + 1) // 2
    if D == 0:
        return [F.T * inv2 % p]
    if pow(D, (p - 1) // 2, p) != 1:
        return []
    s = sqrt_mod(D, p)
    return sorted({(F.T + s) * inv2 % p, (F.T - s) * inv2 % p})


def kronecker(F, p):
    """(disc | p): 1 split, -1 inert, 0 ramified."""
    roots = _roots_mod(F, p)
    if not roots:
        return -1
    return 1 if len(roots) == 2 else 0


@lru_cache(maxsize=None)
def factor_prime(p, F):
    """Prime ideals above the rational prime p, with multiplicities."""
    roots = _roots_mod(F, p)
    if not roots:
        return ((PrimeIdeal(F, 1, 0, p, p, 2, "inert"), 1),)
    kind = "split" if len(roots) == 2 else "ramified"
    out = [PrimeIdeal(F, p, (-r) % p, 1, p, 1, kind, r) for r in roots]
    out.sort(key=lambda P: P.b)
    if kind == "ramified":
        return ((out[0], 2),)
    return tuple((P, 1) for P in out)


def prime_ideals_up_to(F, bound):
    """All prime ideals of norm <= bound, ordered by (norm, HNF)."""
    out = []
    for p in primerange(2, bound + 1):
        for P, _ in factor_prime(p, F):
            if P.norm <= bound:
                out.append(P)
    out.sort(key=Ideal.sort_key)
    return out


def integral_ideals_up_to(F, bound):
    """All integral ideals with norm <= bound, ordered by (norm, HNF)."""
    out = []
    c = 1
    while c * c <= bound:
        for a in range(1, bound // (c * c) + 1):
            for b in range(a):
                if (b * b + F.T * b - F.N0) % a == 0:
                    out.append(Ideal(F, a, b, c))
        c += 1
    out.sort(key=Ideal.sort_key)
    return out


def as_prime(I):
    """Recover the PrimeIdeal object equal to I, or None."""
    if not I.is_integral:
        return None
    n = I.norm
    if n < 2:
        return None
    fac = factorint(n)
    if len(fac) != 1:
        return None
    (p, e), = fac.items()
    if e > 2:
        return None
    for P, _ in factor_prime(p, I.F):
        if P == I:
            return P
    return None


def valuation(I, P):
    """Exponent of the prime P in the factorization of I."""
    F = I.F
    m = I.den
    shift = 0
    if m > 1:
        e = 2 if P.kind == "ramified" else 1
        k = 0
        while m % P.p == 0:
            m //= P.p
            k += 1
        shift = e * k
        I = I * I.den
    Pinv = P.inverse()
    v = 0
    while I.issubset(P):
        I = I * Pinv
        v += 1
    return v - shift


# --- principality ----------------------------------------------------------

def _primitive_generator(F, a, b):
    """An element of norm +-a in Z*a + Z*(b + w), or None if there is none.

    Every generator has a unit multiple alpha with |alpha|, |alpha'| bounded by
    sqrt(a * eps) (real) or sqrt(a) (imaginary); then y = (alpha - alpha')/sqrt(d)
    is bounded and x is recovered from the norm equation.
    """
    if a == 1:
        return F.one
    D, T = F.disc, F.T
    if F.is_real:
        ymax = isqrt(4 * a * F.unit_bound // F.d) + 1
        signs = (1, -1)
    else:
        ymax = isqrt(4 * a // -F.d) + 1
        signs = (1,)
    for y in range(ymax + 1):
        base = D * y * y
        for s in signs:
            disc_y = base + 4 * s * a
            if disc_y < 0:
                continue
            r = isqrt(disc_y)
            if r * r != disc_y:
                continue
            for root in (r, -r):
                num = root - T * y
                if num & 1:
                    continue
                x = num // 2
                if (x - y * b) % a == 0:
                    return QuadNumber(F, x, y)
    return None


def is_principal(I):
    """A generator of I if I is principal, else None."""
    g = _primitive_generator(I.F, I.a, I.b)
    if g is None:
        return None
    return g * I.scale


def canonicalize(x):
    """Deterministic representative of the unit orbit of x.

    Real fields: the multiple with 1 <= |x/x'| < eps^2 and x > 0.
    Imaginary fields: the multiple with argument in [0, 2*pi/w).
    """
    F = x.F
    if x.is_zero():
        raise PreconditionError("zero has no generator class")
    if F.is_real:
        eps = F.fundamental_unit
        eps_inv = eps.inverse()

        def big(z):
            u, v, _ = z.surd()
            return u * v >= 0

        while not big(x):
            x = x * eps
        while big(x * eps_inv):
            x = x * eps_inv
        return x if x.sign() > 0 else -x
    for z in F.torsion_units:
        y = x * z
        if _in_sector(y):
            return y
    raise AssertionError("no torsion multiple in the fundamental sector")


def _in_sector(y):
    u, v, _ = y.surd()
    d = y.F.d
    if d == -1:
        return u > 0 and v >= 0
    if d == -3:
        return u > 0 and 0 <= v < u
    return v > 0 or (v == 0 and u > 0)


def canonical_generator(I):
    g = is_principal(I)
    if g is None:
        raise NotPrincipal(f"{I!r} is not principal")
    return canonicalize(g)


# --- class group -----------------------------------------------------------

class ClassGroup:
    """Cyclic class group with a prime generator and one ideal per class.

    reps[k] is an integral ideal in the class of generator^k.
    """

    def __init__(self, F, h, generator, reps):
        self.F, self.h, self.generator, self.reps = F, h, generator, reps
        self._conj_reps = [R.conj() for R in reps]

    def __repr__(self):
        return f"ClassGroup(d={self.F.d}, h={self.h}, generator={self.generator!r})"

    def ideal_class(self, I, strict=False):
        """k with I ~ generator^k.  The last class is deduced unless strict."""
        if self.h == 1:
            return 0
        last = self.h if strict else self.h - 1
        for k in range(last):
            if is_principal(I * self._conj_reps[k]) is not None:
                return k
        if strict:
            raise AssertionError(f"{I!r} matched no class")
        return self.h - 1

    def same_class(self, I, J):
        return is_principal(I * J.conj()) is not None


def ideal_class(I, G):
    return G.ideal_class(I)


def minkowski_prime_bound(F):
    """Largest integer p with p <= Minkowski bound (rounded up, exact-safe)."""
    D = abs(F.disc)
    if F.is_real:
        # sqrt(D)/2
        return isqrt(D) // 2 + 1
    # (2/pi) sqrt(D) < 2*sqrt(D)/3.14159
    return isqrt(4 * D * 10 ** 10 // 314159 ** 2) + 1


@lru_cache(maxsize=None)
def class_group(F):
    gens = [P for P in prime_ideals_up_to(F, minkowski_prime_bound(F)) if P.degree == 1]
    reps = [Ideal.unit(F)]
    conj = [reps[0]]

    def find(I):
        for i, Rc in enumerate(conj):
            if is_principal(I * Rc) is not None:
                return i
        return None

    queue = [0]
    while queue:
        i = queue.pop(0)
        for P in gens:
            J = reps[i] * P
            if find(J) is None:
                reps.append(J)
                conj.append(J.conj())
                queue.append(len(reps) - 1)
    h = len(reps)
    if h == 1:
        return ClassGroup(F, 1, None, [reps[0]])

    def order_and_powers(I):
        idx = [0]
        J = I
        while True:
            i = find(J)
            if i == 0:
                return idx
            idx.append(i)
            J = reps[i] * I

    if all(len(order_and_powers(R)) < h for R in reps):
        raise NonCyclicClassGroup(f"class group of Q(sqrt({F.d})) (order {h}) is not cyclic")
    p = 2
    while True:
        for P, _ in factor_prime(p, F):
            if P.degree != 1:
                continue
            powers = order_and_powers(P)
            if len(powers) == h:
                by_k = [reps[i] for i in powers]
                by_k[1] = P
                return ClassGroup(F, h, P, by_k)
        p = int(next(iter(primerange(p + 1, 2 * p + 2))))
