import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubeinf import cube, influence
from cubeinf.cube import CubeError, CubeFunction

from conftest import brute_l1_influence, brute_l2_influence


@pytest.mark.parametrize("d", [1, 3, 6])
def test_parity_influence(d):
    f = cube.parity(8, range(1, d + 1))
    for i in range(1, d + 1):
        assert influence.l1_influence(f, i) == 1
    assert influence.l1_influence(f, 8) == 0
    assert influence.total_l1(f) == d
    assert influence.total_l2_via_fourier(cube.fourier_transform(f)) == pytest.approx(d, abs=1e-12)


def test_constant_and_zero():
    assert influence.l1_influence(cube.constant(4, 3.0), 2) == 0
    assert influence.total_l1(cube.constant(5, 0.0)) == 0
    assert influence.total_l2_via_fourier(cube.fourier_transform(cube.constant(3, 2.0))) == 0


def test_majority(maj3):
    assert brute_l1_influence(maj3.values, 3, 1) == 0.5
    assert influence.l1_influence(maj3, 1) == 0.5
    assert influence.total_l1(maj3) == 1.5
    assert influence.total_l2_via_fourier(cube.fourier_transform(maj3)) == pytest.approx(1.5, abs=1e-15)


def test_against_brute_force(rng):
    f = CubeFunction(6, rng.normal(size=64))
    prof = influence.influence_profile(f)
    for i in range(1, 7):
        assert prof.per_coordinate_l1[i - 1] == pytest.approx(brute_l1_influence(f.values, 6, i), abs=1e-13)
        assert prof.per_coordinate_l2[i - 1] == pytest.approx(brute_l2_influence(f.values, 6, i), abs=1e-13)


def test_coordinate_range(maj3):
    with pytest.raises(CubeError):
        influence.l1_influence(maj3, 0)
    with pytest.raises(CubeError):
        influence.l1_influence(maj3, 4)


def test_profile_invariants(rng):
    f = CubeFunction(7, rng.uniform(-1, 1, 128))
    prof = influence.influence_profile(f, threads=3)
    assert prof.total_l1 == pytest.approx(sum(prof.per_coordinate_l1), abs=1e-10)
    assert prof.total_l2 == pytest.approx(sum(prof.per_coordinate_l2), abs=1e-10)
    assert min(prof.per_coordinate_l1) >= 0 and min(prof.per_coordinate_l2) >= 0
    assert prof == influence.influence_profile(f, threads=1)


def test_random_bounded_polynomial_examples():
    c = influence.random_bounded_polynomial(6, 0, 1)
    assert cube.range_width(c) == pytest.approx(0, abs=1e-15)
    assert abs(c(0)) <= 1
    for seed in range(5):
        f = influence.random_bounded_polynomial(6, 6, seed)
        assert cube.norm(f, np.inf) <= 1
        assert cube.degree(cube.fourier_transform(f)) <= 6


def test_random_bounded_polynomial_deterministic():
    a = influence.random_bounded_polynomial(8, 3, 42)
    b = influence.random_bounded_polynomial(8, 3, 42)
    np.testing.assert_array_equal(a.values, b.values)
    assert cube.degree(cube.fourier_transform(a)) <= 3
    assert not np.array_equal(a.values, influence.random_bounded_polynomial(8, 3, 43).values)


def test_random_bounded_polynomial_rejects_degree():
    with pytest.raises(CubeError):
        influence.random_bounded_polynomial(4, 5, 0)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 9), d=st.integers(0, 9), seed=st.integers(0, 2**32 - 1))
def test_l2_fact_and_l1_domination(n, d, seed):
    d = min(d, n)
    f = influence.random_bounded_polynomial(n, d, seed)
    F = cube.fourier_transform(f)
    prof = influence.influence_profile(f)
    deg = cube.degree(F)
    assert influence.total_l2_via_fourier(F) <= deg * cube.norm(f, 2) ** 2 + 1e-9
    assert influence.total_l2_via_fourier(F) == pytest.approx(prof.total_l2, abs=1e-9)
    assert influence.total_l1_via_fourier(F) == pytest.approx(prof.total_l1, abs=1e-9)
    # range width <= 2 so each half-difference is at most 1
    for a, b in zip(prof.per_coordinate_l1, prof.per_coordinate_l2):
        assert a >= b - 1e-15


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 9), seed=st.integers(0, 2**32 - 1), shift=st.floats(-4, 4))
def test_shift_invariance(n, seed, shift):
    f = CubeFunction(n, np.random.default_rng(seed).integers(-8, 8, 1 << n).astype(float) / 4)
    # quarter-integer values keep f + shift exact when shift is too
    shift = round(shift * 4) / 4
    assert influence.influence_profile(f + shift) == influence.influence_profile(f)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 10), seed=st.integers(0, 2**32 - 1))
def test_boolean_collapse(n, seed):
    f = influence.random_boolean_function(n, seed)
    prof = influence.influence_profile(f)
    np.testing.assert_allclose(prof.per_coordinate_l1, prof.per_coordinate_l2, atol=1e-10)
