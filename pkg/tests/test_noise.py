import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubeinf import cube, influence, noise
from cubeinf.cube import CubeError, CubeFunction


def test_identity_and_zero(maj3):
    F = cube.fourier_transform(maj3)
    np.testing.assert_array_equal(noise.apply_noise(F, 1.0).coeffs, F.coeffs)
    Z = noise.apply_noise(F, 0.0).coeffs
    assert Z[0] == F[0] and np.all(Z[1:] == 0)


def test_majority_half(maj3):
    G = noise.apply_noise(cube.fourier_transform(maj3), 0.5)
    for S in (1, 2, 4):
        assert G[S] == pytest.approx(0.25, abs=1e-16)
    assert G[7] == pytest.approx(-1 / 16, abs=1e-16)


def test_rho_above_one_allowed(maj3):
    G = noise.apply_noise(cube.fourier_transform(maj3), 100 / 99)
    assert G[7] == pytest.approx(-0.5 * (100 / 99) ** 3)


def test_sampler_extremes(rng):
    for x in (0, 5, 31):
        assert noise.sample_correlated(x, 5, 1.0, rng) == x
        assert noise.sample_correlated(x, 5, -1.0, rng) == x ^ 31


def test_sampler_rejects_rho():
    with pytest.raises(CubeError):
        noise.sample_correlated(0, 3, 1.5, np.random.default_rng(0))


def test_sampler_agreement_rate_half():
    m = 100_000
    ys = noise.sample_correlated(0, 4, 0.0, np.random.default_rng(3), size=m)
    keep = 1 - ((ys[:, None] >> np.arange(4)) & 1)
    sigma = math.sqrt(0.25 / m)
    assert np.all(np.abs(keep.mean(axis=0) - 0.5) <= 3 * sigma)


def test_sampler_agreement_rate_general():
    m, rho = 100_000, 0.4
    ys = noise.sample_correlated(0b1010, 4, rho, np.random.default_rng(4), size=m)
    same = 1 - (((ys ^ 0b1010)[:, None] >> np.arange(4)) & 1)
    q = (1 + rho) / 2
    assert np.all(np.abs(same.mean(axis=0) - q) <= 3 * math.sqrt(q * (1 - q) / m))


def test_sampler_deterministic():
    a = noise.sample_correlated(3, 6, 0.2, np.random.default_rng(9), size=50)
    b = noise.sample_correlated(3, 6, 0.2, np.random.default_rng(9), size=50)
    np.testing.assert_array_equal(a, b)


def test_mc_check_constant_and_identity(rng, maj3):
    c = noise.noise_mc_check(cube.constant(3, 0.7), 0.3, 2, 100, rng)
    assert c.mc_estimate == pytest.approx(c.fourier_value, abs=1e-15) and c.z_score == 0
    r = noise.noise_mc_check(maj3, 1.0, 5, 100, rng)
    assert r.mc_estimate == maj3(5) and r.z_score == 0


def test_mc_check_majority():
    maj3 = cube.majority(3)
    r = noise.noise_mc_check(maj3, 0.3, cube.point_from_signs([1, 1, 1]), 100_000, np.random.default_rng(11))
    # exact: 3 * 0.5 * 0.3 - 0.5 * 0.3^3
    assert r.fourier_value == pytest.approx(0.45 - 0.0135, abs=1e-15)
    assert abs(r.z_score) <= 4


def test_mc_check_zero_samples(maj3, rng):
    with pytest.raises(CubeError):
        noise.noise_mc_check(maj3, 0.5, 0, 0, rng)


def _brute_noise(values, n, rho, x):
    # E over y with independent keep-probability (1 + rho) / 2
    q = (1 + rho) / 2
    total = 0.0
    for flips in range(1 << n):
        k = bin(flips).count("1")
        total += q ** (n - k) * (1 - q) ** k * values[x ^ flips]
    return total


def test_noise_matches_correlated_expectation(rng):
    f = CubeFunction(5, rng.normal(size=32))
    T = cube.inverse_transform(noise.apply_noise(cube.fourier_transform(f), -0.35))
    for x in range(32):
        assert T(x) == pytest.approx(_brute_noise(f.values, 5, -0.35, x), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 9), seed=st.integers(0, 2**32 - 1), rho=st.floats(-1, 1))
def test_contractive_and_range_preserving(n, seed, rho):
    f = influence.random_bounded_polynomial(n, n, seed) * 3.0
    T = cube.inverse_transform(noise.apply_noise(cube.fourier_transform(f), rho))
    for q in (1, 2, math.inf):
        assert cube.norm(T, q) <= cube.norm(f, q) + 1e-10
    assert T.values.max() <= f.values.max() + 1e-10
    assert T.values.min() >= f.values.min() - 1e-10


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 9), seed=st.integers(0, 2**32 - 1), r1=st.floats(-1.2, 1.2), r2=st.floats(-1.2, 1.2))
def test_semigroup(n, seed, r1, r2):
    F = cube.FourierExpansion(n, np.random.default_rng(seed).uniform(-1, 1, 1 << n))
    a = noise.apply_noise(noise.apply_noise(F, r1), r2).coeffs
    b = noise.apply_noise(F, r1 * r2).coeffs
    assert np.abs(a - b).max() <= 1e-12


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 8), d=st.integers(0, 8), seed=st.integers(0, 2**32 - 1), rho=st.floats(0.05, 2.0))
def test_degree_preserved(n, d, seed, rho):
    d = min(d, n)
    F = cube.fourier_transform(influence.random_bounded_polynomial(n, d, seed))
    k = cube.degree(F, 1e-9)
    assert cube.degree(noise.apply_noise(F, rho), 1e-9 * min(1.0, rho**n)) == k
