import pytest
from hypothesis import given, settings, strategies as st

import oracles
from qfeuclid import (PreconditionError, SignatureError, f_monoid, f_p, factor_prime,
                      gupta_murty_scan, make_field, multiplicatively_independent)
from qfeuclid.ideals import prime_ideals_up_to
from qfeuclid.units import unit_image_set, unit_representatives


def prime_over(F, p, root=None):
    for P, _ in factor_prime(p, F):
        if root is None or P.root == root:
            return P
    raise LookupError


def test_f_examples():
    F = make_field(10)
    P = prime_over(F, 13, 6)   # sqrt(10) = 6 mod 13
    u = f_p(P)
    assert (u.f, u.surjective) == (6, False)
    G = make_field(2)
    Q = prime_over(G, 7, 3)    # sqrt(2) = 3 mod 7
    u = f_p(Q)
    assert (u.f, u.surjective) == (6, True)


def _oracle_f(F, P):
    unit = None
    if F.is_real:
        e = F.fundamental_unit
        unit = (e.a, e.b)
    z = F.torsion_generator
    return oracles.unit_image_size(F.d, P.p, P.kind, P.b, unit, (z.a, z.b))


@pytest.mark.parametrize("d", [2, 10, 3, 13, -1, -3, -5, -15])
def test_f_against_subgroup_closure(d):
    F = make_field(d)
    for P in prime_ideals_up_to(F, 400):
        u = f_p(P)
        assert u.f == _oracle_f(F, P), P
        assert (P.norm - 1) % u.f == 0
        assert u.surjective == (u.f == P.norm - 1)
        assert len(unit_image_set(P)) == u.f


@pytest.mark.parametrize("d", [2, 10, -3, -15])
def test_unit_representatives(d):
    F = make_field(d)
    for P in prime_ideals_up_to(F, 120):
        reps = unit_representatives(P)
        assert len(reps) == f_p(P).f
        residues = [r for r, _ in reps]
        assert len(set(residues)) == len(residues)
        for r, u in reps:
            assert u.is_integral and u.norm() in (1, -1)
            assert P.red(u) == r


def test_f_monoid():
    F = make_field(10)
    P = prime_over(F, 13, 6)
    eps = F.fundamental_unit
    assert f_monoid(P, [eps, -F.one]) == f_p(P).f
    assert f_monoid(P, [F.one]) == 1
    # images 9 and 7 in Z/13
    mul = lambda x, y: x * y % 13
    assert f_monoid(P, [eps, F(1, 1)]) == oracles.closure_size(mul, 1, [9, 7])
    with pytest.raises(PreconditionError):
        f_monoid(P, [F(13)])


def test_multiplicative_independence_examples():
    F = make_field(10)
    eps = F.fundamental_unit
    assert multiplicatively_independent([eps])
    assert not multiplicatively_independent([-F.one])
    assert not multiplicatively_independent([eps, eps ** 2])
    assert multiplicatively_independent([eps, F(2), F(3)])
    assert not multiplicatively_independent([F(6), F(2), F(3)])
    G = make_field(-5)
    assert not multiplicatively_independent([G(-1)])
    assert multiplicatively_independent([G(2), G(3)])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=3, max_size=3),
       st.sampled_from([2, 10, 13]))
def test_independence_detects_built_relations(exps, d):
    F = make_field(d)
    e = F.fundamental_unit
    base = [e, F(3), F(7)]
    x = F.one
    for b, k in zip(base, exps):
        x = x * b ** k
    rel = base + [x]
    # x is a product of the others, so the four are dependent
    assert not multiplicatively_independent(rel)
    assert multiplicatively_independent(base)


def test_gupta_murty_frozen():
    F = make_field(2)
    rows = gupta_murty_scan(F, 10 ** 4, [10, 30, 100])
    # frozen after agreeing with an explicit root-and-closure scan
    assert [(y, c) for y, c, _ in rows] == [(10, 6), (30, 26), (100, 68)]
    assert [r[2] for r in rows] == [100, 900, 10000]


def test_gupta_murty_monotone_and_total():
    F = make_field(10)
    X = 2000
    grid = [1, 2, 5, 10, 50, 200, X]
    rows = gupta_murty_scan(F, X, grid)
    counts = [c for _, c, _ in rows]
    assert counts == sorted(counts)
    assert counts[-1] == len(prime_ideals_up_to(F, X))


def test_gupta_murty_rejects_imaginary():
    with pytest.raises(SignatureError):
        gupta_murty_scan(make_field(-5), 100, [10])
