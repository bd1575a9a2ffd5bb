import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import random_function, random_model, random_point
from tropaut.automorphism import compute_aut
from tropaut.divisor import Divisor, apply_automorphism
from tropaut.formats import parse_function
from tropaut.graph import ModelError, Point
from tropaut.rational import BottomFunctionError, RationalFunction, compose, trop_sum
from tropaut.samples import interval, k4, theta
from tropaut.tropical import NEG_INF

seeds = st.integers(0, 10**6)


def tent(m, peak=Fraction(1, 2)):
    """0 at both ends of the unit interval, slope +1 up to ``peak`` then -1."""
    return RationalFunction.from_pieces(m, {"e": [(0, 0), (peak, peak), (1, 2 * peak - 1)]})


def test_interval_hat_function():
    m = interval()
    f = RationalFunction.from_pieces(m, {"e": [(0, 0), (Fraction(1, 2), Fraction(1, 2)), (1, 0)]})
    z = m.point("e", Fraction(1, 2))
    assert f(z) == Fraction(1, 2) and f(Point(vertex="y")) == 0
    assert f.div() == Divisor.from_mapping(m, {Point(vertex="x"): 1, z: -2, Point(vertex="y"): 1})
    assert f.normalized().max_value() == 0


def test_validation():
    m = interval()
    with pytest.raises(ValueError, match="non-integer slope"):
        RationalFunction.from_pieces(m, {"e": [(0, 0), (1, Fraction(1, 2))]})
    with pytest.raises(ValueError, match="span"):
        RationalFunction.from_pieces(m, {"e": [(0, 0), (Fraction(1, 2), 0)]})
    t = theta()
    with pytest.raises(ValueError, match="discontinuous"):
        RationalFunction.from_pieces(t, {"a": [(0, 0), (1, 0)], "b": [(0, 0), (1, 1)], "c": [(0, 0), (1, 0)]})


def test_collinear_breakpoints_are_pruned():
    m = interval()
    f = RationalFunction.from_pieces(m, {"e": [(0, 0), (Fraction(1, 3), Fraction(1, 3)), (1, 1)]})
    assert f == RationalFunction.from_pieces(m, {"e": [(0, 0), (1, 1)]})


def test_bottom_function():
    m = interval()
    b = RationalFunction.bottom(m)
    assert b(Point(vertex="x")) is NEG_INF
    assert trop_sum(b, tent(m)) == tent(m)
    assert tent(m).shift(NEG_INF).is_bottom
    with pytest.raises(BottomFunctionError):
        b.div()


def test_trop_sum_inserts_crossings():
    m = interval()
    f = RationalFunction.from_pieces(m, {"e": [(0, 0), (1, 1)]})
    g = RationalFunction.from_pieces(m, {"e": [(0, 1), (1, 0)]})
    h = trop_sum(f, g)
    assert h.edge_breaks("e") == ((0, 1), (Fraction(1, 2), Fraction(1, 2)), (1, 1))


def test_compose_with_swap():
    m = interval()
    (iota,) = [s for s in compute_aut(m) if not s.is_identity]
    f = RationalFunction.from_pieces(m, {"e": [(0, 0), (1, -1)]})
    assert compose(f, iota) == RationalFunction.from_pieces(m, {"e": [(0, -1), (1, 0)]})


def test_models_must_match():
    with pytest.raises(ModelError):
        trop_sum(tent(interval()), RationalFunction.constant(theta()))


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_degree_of_div_is_zero(seed):
    rng = random.Random(seed)
    m = random_model(rng)
    assert random_function(rng, m).div().degree == 0


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_trop_sum_is_pointwise_max(seed):
    rng = random.Random(seed)
    m = random_model(rng)
    f, g = random_function(rng, m), random_function(rng, m)
    h = trop_sum(f, g)
    for _ in range(10):
        p = random_point(rng, m)
        assert h(p) == max(f(p), g(p))
    assert trop_sum(f, g) == trop_sum(g, f)
    assert trop_sum(f, f) == f


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_shift_and_difference(seed):
    rng = random.Random(seed)
    m = random_model(rng)
    f, g = random_function(rng, m), random_function(rng, m)
    c = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
    assert f.shift(c).div() == f.div()
    assert (f + g).div() == f.div() + g.div()
    assert (f - f) == RationalFunction.constant(m)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_serialization_round_trip(seed):
    rng = random.Random(seed)
    m = random_model(rng)
    f = random_function(rng, m)
    assert parse_function(m, f.serialize()) == f
    assert RationalFunction.from_json(m, f.to_json()) == f


K4_AUT = compute_aut(k4())


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_compose_transports_div_and_values(seed):
    rng = random.Random(seed)
    m = k4()
    f = random_function(rng, m)
    sigma, tau = rng.choice(K4_AUT.elements), rng.choice(K4_AUT.elements)
    fs = compose(f, sigma)
    for _ in range(6):
        p = random_point(rng, m)
        assert fs(p) == f(sigma(p))
    # div(f o sigma) is the pullback of div f
    assert apply_automorphism(fs.div(), sigma) == f.div()
    assert compose(compose(f, sigma), tau) == compose(f, sigma * tau)
