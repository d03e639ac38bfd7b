"""Sieve counting functions over a panel (A, P) and the inequalities they satisfy.

A panel fixes an integral ideal C, a power n >= 1, a set A of E-ideals in
the class of C^n (with canonical generators x_I, (x_I) = I^-1 C^n) and a set
P of primes p coprime to C with [p^-1] = [C^(n-1)].  All sums are exact.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ClassMismatch, PreconditionError, VerificationError
from .euclid import CosetSpace, EIdeal, GeneratorTable, unit_orbit_keys, witness_box
from .ideals import Ideal, canonical_generator, class_group, integral_ideals_up_to, prime_ideals_up_to
from .units import f_p, unit_representatives


def _q(r):
    """Rational as a 'num/den' string (integers stay bare)."""
    if r is None:
        return None
    r = Fraction(r)
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


@dataclass
class SievePanel:
    C: Ideal
    n: int
    A: list
    script_A: list
    P: list
    X: int
    Q: int
    table: GeneratorTable = field(repr=False, compare=False)

    @property
    def F(self):
        return self.C.F

    @property
    def size(self):
        return len(self.A)

    def subpanel(self, A=None, P=None):
        """Same C and n, restricted A and/or P; X and Q recomputed."""
        A = list(self.A if A is None else A)
        P = list(self.P if P is None else P)
        xs = [self.table.x_of(I, self.n) for I in A]
        return SievePanel(self.C, self.n, A, xs, P, max((I.norm_inv for I in A), default=0),
                          max((p.norm for p in P), default=0), self.table)


def panel_from(C, n, A, P, G=None, table=None):
    """Validate and assemble a panel from explicit E-ideals and primes."""
    if n < 1:
        raise PreconditionError("n must be a positive integer")
    table = table or GeneratorTable(C, G)
    A = list(A)
    if len({I.inv for I in A}) != len(A):
        raise PreconditionError("A must consist of distinct ideals")
    xs = [table.x_of(I, n) for I in A]
    P = list(P)
    for p in P:
        check_prime(table, p, n)
    return SievePanel(C, n, A, xs, P, max((I.norm_inv for I in A), default=0),
                      max((p.norm for p in P), default=0), table)


def build_panel(C, n, X, Q, G=None):
    """All E-ideals I with Nm(I^-1) <= X in [C^n], and all admissible p with Nm(p) <= Q."""
    if n < 1:
        raise PreconditionError("n must be a positive integer")
    F = C.F
    G = G or class_group(F)
    table = GeneratorTable(C, G)
    Cn = table.cpow(n)
    A = [EIdeal(J) for J in integral_ideals_up_to(F, X) if G.ideal_class(J * Cn) == 0]
    target = table.cpow(n - 1)
    P = [p for p in prime_ideals_up_to(F, Q)
         if not C.issubset(p) and G.ideal_class(p * target) == 0]
    return panel_from(C, n, A, P, G, table)


def check_prime(table, p, n):
    if table.C.issubset(p):
        raise PreconditionError(f"{p!r} is not coprime to C")
    try:
        table.x_of(EIdeal(p), n - 1)
    except ClassMismatch:
        raise ClassMismatch(f"[{p!r}^-1] != [C^{n - 1}]") from None


def z_alpha(script_A, alpha, p):
    """#{x in script_A : x = alpha mod p}."""
    r = p.red(alpha)
    return sum(1 for x in script_A if p.red(x) == r)


def residue_counts(panel, p):
    return Counter(p.red(x) for x in panel.script_A)


def x_p(panel, p):
    check_prime(panel.table, p, panel.n)
    return panel.table.x_of(EIdeal(p), panel.n - 1)


def z_beta(panel, beta, p, units=None, counts=None):
    """Z(beta, p, C) through the unit-sum formula.

    `units` overrides the choice of U(p) (any one unit per image class).
    """
    xp = x_p(panel, p)
    if beta not in p.inverse() * panel.C:
        raise PreconditionError(f"{beta!r} is not in p^-1 C")
    counts = counts if counts is not None else residue_counts(panel, p)
    if beta in panel.C:
        return f_p(p).f * counts.get(p.rzero, 0)
    if units is None:
        units = [u for _, u in unit_representatives(p)]
    bx = beta * xp
    return sum(counts.get(p.red(u * bx), 0) for u in units)


def z_beta_bruteforce(panel, beta, p, H):
    """Z(beta, p, C) from its definition, with y restricted to the height-H box of C."""
    check_prime(panel.table, p, panel.n)
    C = panel.C
    if beta not in p.inverse() * C:
        raise PreconditionError(f"{beta!r} is not in p^-1 C")
    F = C.F
    want = {I.inv for I in panel.A}
    norms = {J.norm for J in want}
    pCinv = p * C.inverse()
    scale = Fraction(p.norm, C.norm)
    hit = set()
    for y in witness_box(C, H):
        t = beta + y
        if t.is_zero():
            continue
        # (t)^-1 p^-1 C = I  <=>  I^-1 = t p C^-1
        if abs(t.norm()) * scale not in norms:
            continue
        J = pCinv * t
        if J in want:
            hit.add(J)
    count = len(hit)
    return f_p(p).f * count if beta in C else count


def definition_table(panel, p):
    """Counter over classes of p^-1 C / C: how many I in A each class reaches with y unbounded.

    (beta + y) = I^-1 p^-1 C for some y in C iff beta is congruent mod C to a
    unit multiple of a generator g of I^-1 p^-1 C; unit orbits on p^-1 C / C
    are finite, so this needs no height bound.
    """
    check_prime(panel.table, p, panel.n)
    C = panel.C
    pinvC = p.inverse() * C
    space = CosetSpace(pinvC, C)
    table = Counter()
    for I in panel.A:
        g = canonical_generator(I.inv * pinvC)
        table.update(unit_orbit_keys(space, space.key(g), C.F))
    return space, table


def z_beta_definition(panel, beta, p, table=None):
    space, counts = table or definition_table(panel, p)
    if beta not in space.L:
        raise PreconditionError(f"{beta!r} is not in p^-1 C")
    count = counts.get(space.key(beta), 0)
    return f_p(p).f * count if beta in panel.C else count


def cosets_of(panel, p):
    return list(CosetSpace(p.inverse() * panel.C, panel.C).reps())


def omega_p(panel, p):
    """Number of classes of p^-1 C / C with Z(beta, p, C) = 0."""
    counts = residue_counts(panel, p)
    units = [u for _, u in unit_representatives(p)]
    return sum(1 for r in cosets_of(panel, p)
               if z_beta(panel, r.value, p, units, counts) == 0)


@dataclass(frozen=True)
class PanelReport:
    lhs: Fraction
    rhs_raw: Fraction
    ratio: Fraction | None

    def to_dict(self):
        return {"lhs": _q(self.lhs), "rhs_raw": _q(self.rhs_raw), "ratio": _q(self.ratio)}


def heart_sides(panel, p):
    """Both sides of the per-prime variance inequality, exact."""
    counts = residue_counts(panel, p)
    units = [u for _, u in unit_representatives(p)]
    N = p.norm
    f = f_p(p).f
    mean = Fraction(panel.size, N)
    lhs = Fraction(0)
    zeros = 0
    for r in cosets_of(panel, p):
        z = z_beta(panel, r.value, p, units, counts)
        if z == 0:
            zeros += 1
        lhs += (Fraction(z, f) - mean) ** 2
    rhs = sum((Fraction(c) - mean) ** 2 for c in counts.values())
    rhs += (N - len(counts)) * mean * mean
    return lhs, rhs, zeros


def sieve_heart_check(panel, p):
    lhs, rhs, _ = heart_sides(panel, p)
    if lhs > rhs:
        raise VerificationError(f"variance inequality fails at {p!r}: {lhs} > {rhs}")
    return PanelReport(lhs, rhs, lhs / rhs if rhs else None)


@dataclass
class LargeSieveReport:
    S: Fraction
    W: Fraction
    size: int
    X: int
    Q: int
    s_ratio: Fraction | None
    w_ratio: Fraction | None
    rows: list

    def to_dict(self):
        return {
            "format": 1,
            "S": _q(self.S), "W": _q(self.W), "A_size": self.size,
            "X": self.X, "Q": self.Q,
            "S_ratio": _q(self.s_ratio), "W_ratio": _q(self.w_ratio),
            "primes": self.rows,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)


def large_sieve_panel(panel):
    """S = sum Nm(p) * (per-prime variance) and W = sum omega(p)/Nm(p), with measured constants."""
    S = Fraction(0)
    W = Fraction(0)
    rows = []
    for p in sorted(panel.P, key=lambda q: (q.norm, q.sort_key())):
        lhs, rhs, om = heart_sides(panel, p)
        if lhs > rhs:
            raise VerificationError(f"variance inequality fails at {p!r}")
        S += p.norm * lhs
        W += Fraction(om, p.norm)
        rows.append({"prime": list(p.hnf_triple()), "norm": p.norm, "f": f_p(p).f,
                     "lhs": _q(lhs), "rhs": _q(rhs), "omega": om})
    size, X, Q = panel.size, panel.X, panel.Q
    denom = (Q * Q + X) * size
    s_ratio = S / denom if denom else None
    w_ratio = W * size / (Q * Q + X) if Q * Q + X else None
    return LargeSieveReport(S, W, size, X, Q, s_ratio, w_ratio, rows)
