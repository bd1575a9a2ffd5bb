import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import lattice_distances, random_model, random_point
from tropaut.divisor import Divisor, apply_automorphism, canonical_divisor, is_invariant
from tropaut.graph import (
    CellDecomposition,
    Model,
    ModelError,
    Point,
    Refinement,
    Subgraph,
    boundary_outdegree,
    components,
    frac_gcd,
    subdivide,
)
from tropaut.samples import circle4, interval, k4, theta


def test_build_and_invariants():
    m = k4()
    assert (len(m.vertices), len(m.edges), m.genus) == (4, 6, 3)
    assert m.total_length == 6
    assert theta().genus == 2 and interval().genus == 0
    assert circle4().is_circle() and not theta().is_circle()


@pytest.mark.parametrize(
    "edges",
    [
        [],
        [("e", "a", "b", 0)],
        [("e", "a", "b", -1)],
        [("e", "a", "b", 1), ("e", "b", "c", 1)],
        [("e", "a", "b", 1), ("f", "c", "d", 1)],
    ],
)
def test_bad_models_are_rejected(edges):
    with pytest.raises(ModelError):
        Model.build(edges)


def test_points_normalize_endpoints():
    m = interval()
    assert m.point("e", 0) == Point(vertex="x")
    assert m.point("e", 1) == Point(vertex="y")
    assert m.point("e", Fraction(1, 3)) == Point(edge="e", offset=Fraction(1, 3))
    with pytest.raises(ModelError):
        m.point("e", 2)
    with pytest.raises(ModelError):
        m.check_point(Point(edge="e", offset=Fraction(0)))


def test_germs_and_valency():
    m = Model.build([("l", "o", "o", 2), ("t", "o", "p", 1)])
    assert m.valency(Point(vertex="o")) == 3
    assert m.valency(Point(vertex="p")) == 1
    assert m.valency(m.point("l", 1)) == 2


def test_frac_gcd():
    assert frac_gcd([Fraction(1, 2), Fraction(3, 4)]) == Fraction(1, 4)
    assert frac_gcd([Fraction(2), Fraction(3)]) == 1
    assert frac_gcd([Fraction(2, 3), Fraction(0)]) == Fraction(2, 3)


def test_refinement_round_trip():
    m = theta()
    pts = [m.point("a", Fraction(1, 3)), m.point("b", Fraction(1, 2)), m.point("a", Fraction(2, 3))]
    ref = Refinement.from_points(m, pts)
    fine = ref.fine
    assert len(fine.vertices) == 5 and len(fine.edges) == 6
    assert fine.total_length == m.total_length
    for p in pts + [Point(vertex="u"), m.point("c", Fraction(1, 7)), m.point("a", Fraction(1, 2))]:
        assert ref.to_base(ref.to_fine(p)) == p
    assert set(ref.base_points()) == set(pts) | {Point(vertex="u"), Point(vertex="v")}


def test_subdivide_requires_divisibility():
    assert len(subdivide(circle4(), Fraction(1, 2)).fine.edges) == 8
    with pytest.raises(ModelError):
        subdivide(interval(), Fraction(2, 3))


def test_subgraph_boundary_and_components():
    m = interval()
    s = Subgraph(m, (("e", Fraction(0), Fraction(1, 2)),))
    z = m.point("e", Fraction(1, 2))
    assert s.is_proper() and s.contains(z) and s.contains(Point(vertex="x"))
    assert boundary_outdegree(s, z) == 1
    assert s.boundary_points() == [z]
    two = Subgraph(m, (("e", Fraction(0), Fraction(1, 4)), ("e", Fraction(3, 4), Fraction(1))))
    assert len(components(two)) == 2
    assert m.full().is_full() and not m.full().is_proper()


def test_cell_decomposition_of_theta():
    m = theta()
    cd = CellDecomposition(m, [Point(vertex="u"), Point(vertex="v")])
    assert len(cd) == 3
    assert sorted(cd.germ_cell[Point(vertex="u")]) == [0, 1, 2]
    one = CellDecomposition(m, [Point(vertex="u")])
    assert len(one) == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_lattice_distances_are_a_metric(seed):
    from tropaut.lattice import Lattice

    rng = random.Random(seed)
    m = random_model(rng, max_vertices=3, max_extra=2)
    h = frac_gcd(e.length for e in m.edges)
    if sum(e.length / h for e in m.edges) > 14:
        return
    lat = Lattice(m, h)
    d = lattice_distances(lat.points, lat.segments, h)
    pts = lat.points
    for p in pts:
        for q in pts:
            assert d[p, q] == d[q, p]
            for r in pts:
                assert d[p, r] <= d[p, q] + d[q, r]


def test_divisor_arithmetic_and_format():
    m = interval()
    x, y = Point(vertex="x"), Point(vertex="y")
    D = Divisor.point(m, x, 2) - Divisor.point(m, y)
    assert D.degree == 1 and not D.is_effective()
    assert str(D) == "2*v:x - v:y"
    assert str(Divisor.zero(m)) == "0"
    assert D + Divisor.point(m, y) == Divisor.point(m, x, 2)
    assert 2 * Divisor.point(m, x) == Divisor.point(m, x, 2)
    assert Divisor.from_mapping(m, {x: 1, y: 0}).support == [x]


def test_canonical_divisor():
    assert canonical_divisor(k4()).degree == 2 * k4().genus - 2
    assert canonical_divisor(theta()) == Divisor.from_mapping(theta(), {Point(vertex="u"): 1, Point(vertex="v"): 1})
    assert canonical_divisor(interval()).degree == -2


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_canonical_degree_is_2g_minus_2(seed):
    m = random_model(random.Random(seed))
    assert canonical_divisor(m).degree == 2 * m.genus - 2


def test_pushforward_under_automorphisms():
    from tropaut.automorphism import compute_aut

    m = k4()
    G = compute_aut(m)
    K = canonical_divisor(m)
    assert is_invariant(K, G)
    rng = random.Random(3)
    for _ in range(20):
        p = random_point(rng, m)
        D = Divisor.point(m, p, 2)
        for s in G:
            img = apply_automorphism(D, s)
            assert img.degree == 2 and img.support == [s(p)]
