import random
import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import random_model
from tropaut.automorphism import compute_aut, finite_subgroup_of_circle
from tropaut.divisor import Divisor, apply_automorphism, canonical_divisor
from tropaut.graph import ModelError, Point, frac_gcd
from tropaut.lattice import Lattice
from tropaut.linear_system import (
    EmptyLinearSystemError,
    GranularityWarning,
    LinearSystem,
    NotInvariantError,
    canonical_system,
    extremal_divisor,
    is_hyperelliptic,
    naive_extremal,
    tropical_combination,
)
from tropaut.rational import RationalFunction, compose, trop_sum
from tropaut.samples import circle4, interval, k4, theta, theta_123

X, Y = Point(vertex="x"), Point(vertex="y")


def test_interval_point_divisor():
    m = interval()
    ctx = LinearSystem(m, Divisor.point(m, X))
    assert ctx.h == 1
    gens = ctx.enumerate_extremals()
    assert len(gens) == 2 and gens.check_passed
    assert set(gens.divisors) == {Divisor.point(m, X), Divisor.point(m, Y)}
    assert all(f.max_value() == 0 for f in gens)


def test_interval_midpoint_divisor():
    m = interval()
    z = m.point("e", Fraction(1, 2))
    ctx = LinearSystem(m, Divisor.point(m, z, 2))
    assert ctx.h == Fraction(1, 2)
    gens = ctx.enumerate_extremals()
    # 2z itself is not extremal: its function 0 is the max of the ones for 2x and 2y
    assert set(gens.divisors) == {Divisor.point(m, X, 2), Divisor.point(m, X) + Divisor.point(m, Y), Divisor.point(m, Y, 2)}


def test_membership_and_effective_of():
    m = interval()
    ctx = LinearSystem(m, Divisor.point(m, X))
    down = RationalFunction.from_pieces(m, {"e": [(0, 0), (1, -1)]})
    assert ctx.belongs(down) and ctx.effective_of(down) == Divisor.point(m, Y)
    up = RationalFunction.from_pieces(m, {"e": [(0, 0), (1, 1)]})
    assert not ctx.belongs(up)
    with pytest.raises(ValueError):
        ctx.effective_of(up)
    assert ctx.belongs(RationalFunction.bottom(m))


def test_solve_equivalence_on_the_interval():
    m = interval()
    ctx = LinearSystem(m, Divisor.point(m, X), granularity=Fraction(1, 4))
    for t in range(5):
        E = Divisor.point(m, m.point("e", Fraction(t, 4)))
        f = ctx.solve_equivalence(E)
        assert ctx.D + f.div() == E
    assert ctx.solve_equivalence(Divisor.point(m, X, 2)) is None


def test_circle_point_differences_are_not_principal():
    m = circle4()
    ctx = LinearSystem(m, Divisor.point(m, X) - Divisor.point(m, Point(vertex="p1")))
    assert ctx.is_empty() and ctx.members() == []
    with pytest.raises(EmptyLinearSystemError):
        ctx.enumerate_extremals()
    with pytest.raises(EmptyLinearSystemError):
        LinearSystem(m, -Divisor.point(m, X)).enumerate_extremals()


def test_granularity_must_divide():
    m = interval()
    with pytest.raises(ModelError):
        LinearSystem(m, Divisor.point(m, m.point("e", Fraction(1, 3))), granularity=Fraction(1, 2))
    G = compute_aut(m)
    with pytest.raises(ModelError, match="reverses"):
        LinearSystem(m, Divisor.point(m, X), granularity=1, group=G)
    assert LinearSystem(m, Divisor.point(m, X), group=G).h == Fraction(1, 2)


def test_coarse_lattice_is_flagged():
    t = theta()
    with pytest.warns(GranularityWarning):
        gs = LinearSystem(t, canonical_divisor(t)).enumerate_extremals()
    assert not gs.check_passed
    fine = canonical_system(t, refine=2).enumerate_extremals()
    assert fine.check_passed and len(fine) == 3


def test_invariant_representative_and_generating_set():
    m = interval()
    G = compute_aut(m)
    ctx = LinearSystem(m, Divisor.point(m, X), group=G)
    Dp = ctx.invariant_representative()
    assert Dp == Divisor.point(m, m.point("e", Fraction(1, 2)))
    with pytest.raises(NotInvariantError):
        ctx.invariant_generating_set()
    gens = LinearSystem(m, Dp, group=G).invariant_generating_set()
    assert len(gens) == 2


def test_generators_with_larger_stabilizers_come_last():
    m = interval()
    G = compute_aut(m)
    gens = LinearSystem(m, Divisor.point(m, m.point("e", Fraction(1, 2)), 2), group=G).enumerate_extremals()
    fixed = [all(compose(f, s) == f for s in G) for f in gens]
    assert fixed == [False, False, True]


def test_rank():
    m = interval()
    assert LinearSystem(m, Divisor.point(m, X)).rank() == 1
    c = circle4()
    assert LinearSystem(c, Divisor.point(c, X, 2)).rank() == 1
    assert LinearSystem(c, Divisor.point(c, X) - Divisor.point(c, Point(vertex="p1"))).rank() == -1
    assert canonical_system(theta()).rank() == 1
    assert canonical_system(k4()).rank() == 2


def test_hyperelliptic():
    assert is_hyperelliptic(theta())
    assert is_hyperelliptic(theta_123())
    assert not is_hyperelliptic(k4())
    with pytest.raises(ValueError):
        is_hyperelliptic(circle4())


# -- properties -----------------------------------------------------------------


def random_system(rng, max_points=10, max_degree=3):
    while True:
        m = random_model(rng, max_vertices=3, max_extra=2)
        h = frac_gcd(e.length for e in m.edges)
        lat = Lattice(m, h)
        if len(lat) > max_points:
            continue
        deg = rng.randint(1, max_degree)
        vec = lat.effective(deg)
        D = lat.divisor(vec[rng.randrange(len(vec))])
        return LinearSystem(m, D, granularity=h)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_members_form_a_tropical_semimodule(seed):
    rng = random.Random(seed)
    ctx = random_system(rng)
    members = ctx.members()
    assert members
    for _ in range(5):
        (_, f), (_, g) = rng.choice(members), rng.choice(members)
        c = Fraction(rng.randint(-3, 3), 2)
        assert ctx.belongs(trop_sum(f.shift(c), g))
        assert ctx.belongs(f.shift(c))
    for E, f in members:
        assert ctx.D + f.div() == E and E.is_effective()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_every_member_is_generated(seed):
    rng = random.Random(seed)
    ctx = random_system(rng)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", GranularityWarning)
        gens = ctx.enumerate_extremals()
    if not gens.check_passed:
        return
    for _, f in ctx.members():
        assert tropical_combination(f, gens.functions) == f


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_fast_extremality_matches_naive(seed):
    rng = random.Random(seed)
    ctx = random_system(rng, max_points=7, max_degree=2)
    for E, f in ctx.members():
        if len(E.support) <= 3:
            assert extremal_divisor(E) == naive_extremal(E, ctx.lattice.points)


K4 = k4()
K4_AUT = compute_aut(K4)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_members_transfer_under_automorphisms(seed):
    # f in R(D)  =>  f o sigma^-1 in R(sigma_* D)
    rng = random.Random(seed)
    lat = Lattice(K4, 1)
    vec = lat.effective(2)
    D = lat.divisor(vec[rng.randrange(len(vec))])
    sigma = rng.choice(K4_AUT.elements)
    ctx = LinearSystem(K4, D)
    moved = LinearSystem(K4, apply_automorphism(D, sigma))
    for E, f in ctx.members():
        g = compose(f, sigma.inverse())
        assert moved.belongs(g)
        assert moved.effective_of(g) == apply_automorphism(E, sigma)


def test_extremals_of_an_invariant_divisor_are_permuted():
    c = circle4()
    G = finite_subgroup_of_circle(c, rotations=[1])
    D = Divisor.from_mapping(c, {Point(vertex=v): 1 for v in c.vertices})
    gens = set(LinearSystem(c, D, refine=2, group=G).enumerate_extremals().functions)
    assert gens
    for s in G:
        assert {compose(f, s).normalized() for f in gens} == gens
