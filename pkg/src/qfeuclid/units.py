"""Images of the unit group (and of finitely generated monoids) modulo primes."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import lcm

from sympy import Matrix, factorint

from .errors import PreconditionError, SignatureError
from .field import unit_exponent
from .ideals import Ideal, factor_prime, prime_ideals_up_to, valuation


@dataclass(frozen=True)
class UnitImage:
    p: object
    f: int
    surjective: bool


@lru_cache(maxsize=None)
def f_p(p):
    """Order of the image of O_K^x in (O_K/p)^x.

    The residue group is cyclic, so the image of a set of generators has order
    lcm of the individual element orders.
    """
    order = 1
    for u in p.F.unit_generators:
        order = lcm(order, p.rorder(p.red(u)))
    return UnitImage(p, order, order == p.size - 1)


def unit_image_set(p):
    """The subgroup q_p(O_K^x) of (O_K/p)^x as a set of residues."""
    return _closure(p, [p.red(u) for u in p.F.unit_generators])


def _closure(p, gens):
    seen = {p.rone}
    frontier = [p.rone]
    while frontier:
        nxt = []
        for s in frontier:
            for g in gens:
                t = p.rmul(s, g)
                if t not in seen:
                    seen.add(t)
                    nxt.append(t)
        frontier = nxt
    return seen


def unit_representatives(p):
    """U(p): one unit per element of the unit image, keyed by residue.

    Units are searched as zeta^i * eps^j in order of increasing j then i, so
    each residue gets the first unit reaching it.  Sorted by residue.
    """
    F = p.F
    target = f_p(p).f
    reps = {}
    tors = F.torsion_units
    if F.is_real:
        eps = F.fundamental_unit
        e_pow = F.one
        j = 0
        while len(reps) < target:
            for z in tors:
                u = z * e_pow
                reps.setdefault(p.red(u), u)
            e_pow = e_pow * eps
            j += 1
    else:
        for z in tors:
            reps.setdefault(p.red(z), z)
    return sorted(reps.items())


def f_monoid(p, gens):
    """|q_p(M)| for the monoid M generated by gens (which must avoid p)."""
    res = []
    for g in gens:
        if not g.is_integral:
            raise PreconditionError(f"{g!r} is not an algebraic integer")
        r = p.red(g)
        if r == p.rzero:
            raise PreconditionError(f"generator {g!r} lies in {p!r}")
        res.append(r)
    return len(_closure(p, res))


def _element_primes(x):
    n = x.norm()
    num, den = (n.numerator, n.denominator) if not isinstance(n, int) else (n, 1)
    ps = set(factorint(abs(num))) | set(factorint(den)) | set(factorint(x.den))
    ps.discard(1)
    out = []
    for ell in sorted(ps):
        out.extend(P for P, _ in factor_prime(ell, x.F))
    return out


def multiplicatively_independent(xs):
    """True iff x_1^a_1 ... x_n^a_n = 1 forces a = 0.

    Relations are first sought among prime-ideal valuation vectors; every
    rational relation there leaves a unit, whose exponent of the fundamental
    unit (zero in imaginary fields) must also vanish.
    """
    xs = list(xs)
    if not xs:
        return True
    if any(x.is_zero() for x in xs):
        raise PreconditionError("zero is not in K^x")
    F = xs[0].F
    primes = []
    for x in xs:
        for P in _element_primes(x):
            if P not in primes:
                primes.append(P)
    n = len(xs)
    if primes:
        M = Matrix([[valuation(Ideal.principal(x), P) for x in xs] for P in primes])
        kernel = M.nullspace()
    else:
        kernel = [Matrix([1 if i == j else 0 for i in range(n)]) for j in range(n)]
    if not kernel:
        return True
    if not F.is_real or len(kernel) >= 2:
        return False
    v = kernel[0]
    den = 1
    for q in v:
        den = lcm(den, int(q.q))
    w = [int(q * den) for q in v]
    u = F.one
    for x, e in zip(xs, w):
        u = u * x ** e
    _, k = unit_exponent(u)
    return k != 0


def gupta_murty_scan(F, X, y_grid, gens=None):
    """Rows (y, #{p : Nm(p) <= X, f(p) <= y}, y^2) over prime ideals of K.

    With gens=None the monoid is the unit group.
    """
    if not F.is_real:
        raise SignatureError("the unit group of an imaginary field is finite")
    fs = []
    for P in prime_ideals_up_to(F, X):
        if gens is None:
            fs.append(f_p(P).f)
        else:
            if any(P.red(g) == P.rzero for g in gens):
                continue
            fs.append(f_monoid(P, gens))
    return [(y, sum(1 for f in fs if f <= y), y * y) for y in sorted(y_grid)]
