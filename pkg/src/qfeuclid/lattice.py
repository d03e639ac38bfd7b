"""Rank-2 integer lattices in Hermite normal form, and quotient boxes."""
from math import gcd


def xgcd(a, b):
    """(g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


def hnf(vectors):
    """HNF (A, B, D) of the lattice spanned by integer pairs (x, y).

    The lattice equals Z*(A, 0) + Z*(B, D) with A, D > 0 and 0 <= B < A.
    Raises ValueError if the vectors do not span a rank-2 lattice.
    """
    A = B = D = 0
    for x, y in vectors:
        if y == 0:
            A = gcd(A, x)
            continue
        if D == 0:
            B, D = (x, y) if y > 0 else (-x, -y)
            continue
        g, s, t = xgcd(D, y)
        A = gcd(A, (y // g) * B - (D // g) * x)
        B, D = s * B + t * x, g
    if A == 0 or D == 0:
        raise ValueError("vectors do not span a full-rank lattice")
    return A, B % A, D


def in_hnf(hnf_t, x, y):
    A, B, D = hnf_t
    if y % D:
        return False
    return (x - (y // D) * B) % A == 0


class QuotientBox:
    """Representatives of L/M for integer lattices M <= L given in L-coordinates.

    `sub` is the HNF of M expressed in the coordinates of a basis of L; the
    representatives are i*f1 + j*f2 with 0 <= i < A, 0 <= j < D.
    """

    def __init__(self, sub):
        self.A, self.B, self.D = sub

    @property
    def index(self):
        return self.A * self.D

    def reduce(self, k1, k2):
        q, k2 = divmod(k2, self.D)
        return ((k1 - q * self.B) % self.A, k2)

    def reps(self):
        for j in range(self.D):
            for i in range(self.A):
                yield (i, j)
