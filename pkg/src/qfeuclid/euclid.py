"""Motzkin-type level sets for a candidate Euclidean ideal C.

An E-ideal I (a fractional ideal containing O_K) is stored through its
inverse, an integral ideal.  Level 0 holds O_K alone; I gets level i when
every nonzero class x of IC/C has some y in C with (x + y)^-1 IC already at
a level below i.  Search is bounded by the norm of I^-1, the witness height
of y and the depth; an assigned level is a checkable certificate, a missing
one proves nothing.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from sympy import isprime

from .errors import ClassMismatch, PreconditionError
from .field import QuadNumber
from .ideals import (Ideal, as_prime, canonical_generator, class_group, factor_prime,
                     integral_ideals_up_to, prime_ideals_up_to)
from .lattice import QuotientBox, hnf
from .units import f_p

FORMAT_VERSION = 1


@dataclass(frozen=True)
class EIdeal:
    inv: Ideal

    @cached_property
    def ideal(self):
        return self.inv.inverse()

    @property
    def norm_inv(self):
        return self.inv.norm

    @classmethod
    def of(cls, I):
        """E-ideal from a fractional ideal containing O_K."""
        inv = I.inverse()
        if not inv.is_integral:
            raise PreconditionError(f"{I!r} does not contain O_K")
        return cls(inv)


class CosetSpace:
    """The finite quotient L/M of ideals M <= L with box representatives."""

    def __init__(self, L, M):
        self.L, self.M = L, M
        self.f1, self.f2 = L.basis()
        vecs = []
        for g in M.basis():
            k1, k2 = L.coords(g)
            if k1.denominator != 1 or k2.denominator != 1:
                raise PreconditionError(f"{M!r} is not contained in {L!r}")
            vecs.append((int(k1), int(k2)))
        self.box = QuotientBox(hnf(vecs))

    def __len__(self):
        return self.box.index

    def key(self, x):
        k1, k2 = self.L.coords(x)
        if k1.denominator != 1 or k2.denominator != 1:
            raise PreconditionError(f"{x!r} is not in {self.L!r}")
        return self.box.reduce(int(k1), int(k2))

    def value(self, key):
        i, j = key
        return self.center(self.f1 * i + self.f2 * j)

    def center(self, x):
        """The element of x + M nearest the origin in the HNF coordinates of M."""
        M = self.M
        s = M.scale
        yb = Fraction(x.b, x.den)
        m = _round(yb / s)
        xa = Fraction(x.a, x.den) - m * s * M.b
        n = _round(xa / (s * M.a))
        return x - QuadNumber(x.F, (n * M.a + m * M.b) * s.numerator, m * s.numerator, s.denominator)

    def reps(self):
        for key in self.box.reps():
            yield CosetRep(self.value(key), key, key == (0, 0))


def _round(q):
    return (2 * q.numerator + q.denominator) // (2 * q.denominator)


@dataclass(frozen=True)
class CosetRep:
    value: QuadNumber
    key: tuple
    zero: bool


def cosets(I, C):
    """Representatives of IC/C, zero class first."""
    return list(CosetSpace(I.ideal * C, C).reps())


def generates_module(x, I, C):
    """Whether x generates IC/C as an O_K-module, i.e. (x) + C = IC."""
    IC = I.ideal * C
    if x not in IC:
        raise PreconditionError(f"{x!r} is not in IC")
    if x.is_zero():
        return C == IC
    return Ideal.principal(x) + C == IC


class GeneratorTable:
    """Canonical x with (x) = I^-1 C^n for E-ideals I in the class of C^n."""

    def __init__(self, C, G=None):
        self.C = C
        self.G = G or class_group(C.F)
        self._x = {}
        self._cpow = {0: Ideal.unit(C.F)}

    def cpow(self, n):
        if n not in self._cpow:
            self._cpow[n] = self.C ** n
        return self._cpow[n]

    def x_of(self, I, n):
        if n < 0:
            raise PreconditionError("n must be nonnegative")
        k = (I.inv.key(), n)
        if k not in self._x:
            J = I.inv * self.cpow(n)
            if self.G.ideal_class(J, strict=True) != 0:
                raise ClassMismatch(f"[I] != [C^{n}] for I^-1 = {I.inv!r}")
            self._x[k] = canonical_generator(J)
        return self._x[k]


def pick_x(I, C, n, G=None, table=None):
    table = table or GeneratorTable(C, G)
    return table.x_of(I, n)


def mult_xp_iso_check(p, C, n, G=None, table=None):
    """Enumerate x -> x_p * x from p^-1 C / C to C^n / p C^n; True iff bijective."""
    table = table or GeneratorTable(C, G)
    if n < 1:
        raise PreconditionError("n must be positive")
    xp = table.x_of(EIdeal(p), n - 1)
    src = CosetSpace(p.inverse() * C, C)
    Cn = table.cpow(n)
    dst = CosetSpace(Cn, p * Cn)
    image = {dst.key(xp * r.value) for r in src.reps()}
    return len(src) == len(dst) == len(image)


def is_b1_member(p, C, G=None):
    """Exact test for p^-1 in B_1: [p] = [C] and units surject onto (O/p)^x."""
    G = G or class_group(C.F)
    if C.issubset(p):
        raise PreconditionError(f"{p!r} divides C")
    if G.h > 1 and not G.same_class(p, C):
        return False
    return f_p(p).surjective


def witness_box(C, H):
    """All y = a + b*w in C with |a|, |b| <= H, ordered by size then coordinates."""
    F = C.F
    out = []
    if not C.is_integral:
        raise PreconditionError("C must be integral")
    a_c, b_c, c = C.a, C.b, C.c
    step = a_c * c
    for b in range(-(H // c) * c, H + 1, c):
        r = (b // c) * c * b_c % step
        lo = -H + ((r + H) % step)
        for a in range(lo, H + 1, step):
            out.append((a, b))
    out.sort(key=lambda ab: (max(abs(ab[0]), abs(ab[1])), abs(ab[0]) + abs(ab[1]), ab))
    return [QuadNumber(F, a, b) for a, b in out]


def _abs_norm_scaled(F, X, Y, den, ya, yb):
    A = X + den * ya
    B = Y + den * yb
    return abs(A * A + F.T * A * B - F.N0 * B * B)


@dataclass
class LevelAssignment:
    C: Ideal
    norm_bound: int
    height: int
    depth: int
    mode: str = "E"
    levels: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)
    unassigned: list = field(default_factory=list)

    @property
    def F(self):
        return self.C.F

    def level(self, inv):
        return self.levels.get(inv)

    def to_json(self):
        def tri(I):
            return list(I.hnf_triple())

        doc = {
            "format": "qfeuclid.level-assignment",
            "version": FORMAT_VERSION,
            "d": self.F.d,
            "C": tri(self.C),
            "mode": self.mode,
            "bounds": {"norm_bound": self.norm_bound, "height": self.height, "depth": self.depth},
            "levels": [{"inv": tri(J), "level": lv}
                       for J, lv in sorted(self.levels.items(), key=lambda t: t[0].sort_key())],
            "unassigned": [tri(J) for J in sorted(self.unassigned, key=Ideal.sort_key)],
            "witnesses": [{"inv": tri(J), "x": list(x.as_tuple()), "y": [y.a, y.b]}
                          for (J, _), (x, y) in sorted(self.witnesses.items(),
                                                       key=lambda t: (t[0][0].sort_key(), t[0][1]))],
        }
        return json.dumps(doc, sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_json(cls, text):
        from .field import QuadraticField

        doc = json.loads(text)
        if doc.get("format") != "qfeuclid.level-assignment" or doc.get("version") != FORMAT_VERSION:
            raise PreconditionError("unrecognized level-assignment document")
        F = QuadraticField(doc["d"])
        C = Ideal.from_hnf(F, *doc["C"])
        b = doc["bounds"]
        L = cls(C, b["norm_bound"], b["height"], b["depth"], doc["mode"])
        for row in doc["levels"]:
            L.levels[Ideal.from_hnf(F, *row["inv"])] = row["level"]
        L.unassigned = [Ideal.from_hnf(F, *t) for t in doc["unassigned"]]
        for row in doc["witnesses"]:
            J = Ideal.from_hnf(F, *row["inv"])
            x = QuadNumber(F, *row["x"])
            y = QuadNumber(F, *row["y"])
            space = CosetSpace(J.inverse() * C, C)
            L.witnesses[(J, space.key(x))] = (x, y)
        return L


def _candidates(F, B, mode):
    if mode == "E":
        return integral_ideals_up_to(F, B)
    if mode == "B":
        return [Ideal.unit(F)] + prime_ideals_up_to(F, B)
    raise PreconditionError(f"unknown mode {mode!r}")


def reachable_targets(J, C, box, allowed, norms, B):
    """For each nonzero class x of J^-1 C / C: {target inverse: first witness y}."""
    F = C.F
    nJ, nC = J.norm, C.norm
    I = J.inverse()
    JCinv = J * C.inverse()
    out = {}
    for rep in CosetSpace(I * C, C).reps():
        if rep.zero:
            continue
        x = rep.value
        targets = {}
        X, Y, den = x.a, x.b, x.den
        scale = den * den * nC
        for y in box:
            m = _abs_norm_scaled(F, X, Y, den, y.a, y.b)
            if m == 0:
                continue
            n, r = divmod(m * nJ, scale)
            if r or n > B or n not in norms:
                continue
            T = JCinv * (x + y)
            if T in allowed and T not in targets:
                targets[T] = y
        out[rep.key] = (x, targets)
    return out


def motzkin_search(C, G=None, B=30, H=20, k=6, mode="E"):
    """Bounded Motzkin construction; returns a LevelAssignment."""
    F = C.F
    G = G or class_group(F)
    if G.h > 1 and not _generates(C, G):
        raise PreconditionError("[C] does not generate the class group")
    cands = _candidates(F, B, mode)
    allowed = set(cands)
    norms = {J.norm for J in cands}
    box = witness_box(C, H)
    unit = Ideal.unit(F)
    graph = {J: reachable_targets(J, C, box, allowed, norms, B) for J in cands if J != unit}
    levels = {unit: 0}
    chosen = {}
    for i in range(1, k + 1):
        new = {}
        for J in cands:
            if J in levels:
                continue
            picks = {}
            for key, (x, targets) in graph[J].items():
                best = None
                for T, y in targets.items():
                    lv = levels.get(T)
                    if lv is not None and (best is None or lv < best[0]):
                        best = (lv, y)
                if best is None:
                    break
                picks[key] = (x, best[1])
            else:
                new[J] = (i, picks)
        if not new:
            break
        for J, (lv, picks) in new.items():
            levels[J] = lv
            for key, xy in picks.items():
                chosen[(J, key)] = xy
    L = LevelAssignment(C, B, H, k, mode, levels, chosen)
    L.unassigned = [J for J in cands if J not in levels]
    return L


def _generates(C, G):
    k = G.ideal_class(C)
    from math import gcd
    return gcd(k, G.h) == 1


def assignment_violations(L, C=None):
    """Independent recheck of every stored witness; returns a list of problems."""
    C = C or L.C
    F = C.F
    problems = []
    unit = Ideal.unit(F)
    if L.levels.get(unit) != 0:
        problems.append("O_K is not at level 0")
    by_ideal = {}
    for (J, _), (x, y) in L.witnesses.items():
        by_ideal.setdefault(J, []).append((x, y))
    for J, lv in L.levels.items():
        if J == unit:
            continue
        if not J.is_integral:
            problems.append(f"{J!r}: stored inverse is not integral")
            continue
        I = J.inverse()
        IC = I * C
        ws = by_ideal.get(J, [])
        if len(ws) != J.norm - 1:
            problems.append(f"{J!r}: {len(ws)} witnesses for {J.norm - 1} nonzero classes")
        xs = [x for x, _ in ws]
        for i in range(len(xs)):
            for j in range(i):
                if (xs[i] - xs[j]) in C:
                    problems.append(f"{J!r}: two witnesses for one class")
        for x, y in ws:
            if x not in IC or x in C:
                problems.append(f"{J!r}: {x!r} is not in IC \\ C")
                continue
            if y not in C:
                problems.append(f"{J!r}: witness {y!r} not in C")
                continue
            t = x + y
            if t.is_zero():
                problems.append(f"{J!r}: x + y = 0")
                continue
            target = Ideal.principal(t).inverse() * IC
            tinv = target.inverse()
            tl = L.levels.get(tinv) if tinv.is_integral else None
            if tl is None or tl >= lv:
                problems.append(f"{J!r}: witness {y!r} for {x!r} lands at level {tl} >= {lv}")
    return problems


def verify_assignment(L, C=None):
    return not assignment_violations(L, C)


def is_prime_ideal(q):
    """Primality of an integral ideal of a quadratic order."""
    n = q.norm
    if n < 2:
        return False
    if isprime(n):
        return True
    r = _isqrt_exact(n)
    if r is None or not isprime(r):
        return False
    P = factor_prime(r, q.F)[0][0]
    return P.kind == "inert" and P == q


def _isqrt_exact(n):
    from math import isqrt
    r = isqrt(n)
    return r if r * r == n else None


def similar_density(x, I, C, X, H):
    """Distinct primes q = (x + y) I^-1 C^-1 of norm <= X over y in the height-H box."""
    if not generates_module(x, I, C):
        raise PreconditionError("(x) + C != IC")
    F = C.F
    J = I.inv
    JCinv = J * C.inverse()
    nJ, nC = J.norm, C.norm
    found = {}
    for y in witness_box(C, H):
        t = x + y
        if t.is_zero():
            continue
        n = Fraction(abs(t.norm_numerator()) * nJ, t.den * t.den * nC)
        if n > X:
            continue
        n = int(n)
        if not (isprime(n) or (_isqrt_exact(n) and isprime(_isqrt_exact(n)))):
            continue
        q = JCinv * t
        if q not in found and is_prime_ideal(q):
            found[q] = y
    witnesses = sorted(found.items(), key=lambda t: t[0].sort_key())
    return len(witnesses), witnesses


def unit_orbit_keys(space, key, F):
    """Keys of the orbit of a class of space under multiplication by units."""
    # multiplication by u is Z-linear on the basis (f1, f2) of L
    mats = []
    for u in F.unit_generators:
        c1 = space.L.coords(u * space.f1)
        c2 = space.L.coords(u * space.f2)
        mats.append((int(c1[0]), int(c2[0]), int(c1[1]), int(c2[1])))
    reduce = space.box.reduce
    orbit = {key}
    frontier = [key]
    while frontier:
        nxt = []
        for i, j in frontier:
            for m00, m01, m10, m11 in mats:
                k2 = reduce(m00 * i + m01 * j, m10 * i + m11 * j)
                if k2 not in orbit:
                    orbit.add(k2)
                    nxt.append(k2)
        frontier = nxt
    return orbit


def certify_b2(p, C, box, b1_test):
    """Witnesses placing p^-1 at level <= 2 of the B-sets, or None.

    Every nonzero class of p^-1 C / C needs some y in the box with
    (x + y)^-1 p^-1 C equal to O_K or to q^-1 for a prime q with b1_test(q).
    Classes are handled one unit orbit at a time.
    """
    F = C.F
    space = CosetSpace(p.inverse() * C, C)
    nP, nC = p.norm, C.norm
    pCinv = p * C.inverse()
    done = {(0, 0)}
    wits = {}
    for key in space.box.reps():
        if key in done:
            continue
        x = space.value(key)
        X, Y, den = x.a, x.b, x.den
        scale = den * den * nC
        hit = None
        for y in box:
            m = _abs_norm_scaled(F, X, Y, den, y.a, y.b)
            if m == 0:
                continue
            n, r = divmod(m * nP, scale)
            if r:
                continue
            if n == 1:
                hit = (y, Ideal.unit(F))
                break
            if not isprime(n):
                s = _isqrt_exact(n)
                if s is None or not isprime(s):
                    continue
            q = pCinv * (x + y)
            qp = as_prime(q)
            if qp is not None and not C.issubset(qp) and b1_test(qp):
                hit = (y, qp)
                break
        if hit is None:
            return None
        wits[key] = (x,) + hit
        done |= unit_orbit_keys(space, key, F)
    return wits
