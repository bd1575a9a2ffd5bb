import os
import random
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import is_q_reduced, random_model
from tropaut import _kernels
from tropaut.graph import frac_gcd
from tropaut.lattice import Lattice
from tropaut.samples import k4, theta

BACKENDS = ["loops", "numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])


def small_lattice(rng):
    while True:
        m = random_model(rng, max_vertices=4, max_extra=3)
        h = frac_gcd(e.length for e in m.edges)
        if sum(e.length / h for e in m.edges) <= 16:
            return Lattice(m, h)


@pytest.mark.parametrize("backend", BACKENDS)
def test_reduction_of_a_theta_midpoint(backend):
    lat = Lattice(theta(), Fraction(1, 2))
    c = np.zeros(len(lat), dtype=np.int64)
    c[lat.index[theta().point("a", Fraction(1, 2))]] = 3
    red, script = lat.reduce(c, backend)
    assert np.array_equal(red, c - lat.laplacian @ script)
    assert is_q_reduced(lat.laplacian, red, lat.arrays.q)
    assert red.sum() == 3


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_backends_agree_and_reduce_correctly(seed):
    rng = random.Random(seed)
    lat = small_lattice(rng)
    n = len(lat)
    chips = np.array([rng.randint(-2, 3) for _ in range(n)], dtype=np.int64)
    results = [lat.reduce(chips, b) for b in BACKENDS]
    q = lat.arrays.q
    base_script = results[0][1] - results[0][1][q]
    for red, script in results:
        assert np.array_equal(red, results[0][0])
        # red = chips - L s; scripts are only defined up to adding a constant vector
        assert np.array_equal(red, chips - lat.laplacian @ script)
        assert np.array_equal(script - script[q], base_script)
    if n <= 10:
        assert is_q_reduced(lat.laplacian, results[0][0], lat.arrays.q)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_batch_matches_single(seed):
    rng = random.Random(seed)
    lat = small_lattice(rng)
    batch = lat.effective(2)
    for b in BACKENDS:
        red, scripts = lat.reduce_batch(batch, b)
        for row, r, s in zip(batch, red, scripts):
            assert np.array_equal(r, lat.reduce(row, "loops")[0])
            assert np.array_equal(r, row - lat.laplacian @ s)


def test_reduction_is_a_class_invariant():
    lat = Lattice(k4(), Fraction(1, 2))
    rng = random.Random(1)
    for _ in range(30):
        a = np.array([rng.randint(0, 2) for _ in range(len(lat))], dtype=np.int64)
        s = np.array([rng.randint(-3, 3) for _ in range(len(lat))], dtype=np.int64)
        assert np.array_equal(lat.reduce(a)[0], lat.reduce(a - lat.laplacian @ s)[0])


def test_effective_divisors_enumeration():
    eff = _kernels.effective_divisors(4, 3)
    assert len(eff) == 20  # C(6, 3)
    assert (eff.sum(axis=1) == 3).all() and (eff >= 0).all()
    assert len({tuple(r) for r in eff}) == 20


def test_unknown_backend():
    lat = Lattice(theta(), 1)
    with pytest.raises(ValueError):
        lat.reduce(np.zeros(len(lat), dtype=np.int64), "fortran")


@pytest.mark.parametrize("flag", ["0", "off"])
def test_env_flag_disables_numba(flag):
    code = "from tropaut import _kernels; print(_kernels.default_backend())"
    env = dict(os.environ, TROPAUT_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
