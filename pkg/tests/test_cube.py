import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubeinf import cube
from cubeinf.cube import CubeError, CubeFunction, FourierExpansion

from conftest import brute_coefficients


def test_dictator_coefficients():
    F = cube.fourier_transform(CubeFunction(1, [1.0, -1.0]))
    np.testing.assert_allclose(F.coeffs, [0.0, 1.0])


def test_constant_coefficients():
    F = cube.fourier_transform(cube.constant(4, 2.5))
    assert F[0] == 2.5
    assert np.all(F.coeffs[1:] == 0)


def test_majority_coefficients_match_brute_force(maj3):
    expected = brute_coefficients(maj3.values, 3)
    # frozen from the 8-point inner products
    np.testing.assert_allclose(expected, [0, 0.5, 0.5, 0, 0.5, 0, 0, -0.5], atol=1e-15)
    np.testing.assert_allclose(cube.fourier_transform(maj3).coeffs, expected, atol=1e-15)


def test_random_function_matches_brute_force(rng):
    vals = rng.normal(size=32)
    F = cube.fourier_transform(CubeFunction(5, vals))
    np.testing.assert_allclose(F.coeffs, brute_coefficients(vals, 5), atol=1e-13)


def test_inverse_examples():
    assert np.all(cube.inverse_transform(FourierExpansion(3, [1] + [0] * 7)).values == 1)
    np.testing.assert_array_equal(cube.inverse_transform(FourierExpansion(1, [0, 1])).values, [1, -1])


def test_round_trip_n10(rng):
    F = FourierExpansion(10, rng.normal(size=1024))
    back = cube.fourier_transform(cube.inverse_transform(F))
    assert np.abs(back.coeffs - F.coeffs).max() <= 1e-12


def test_walsh_hadamard_batched(rng):
    a = rng.normal(size=(3, 16))
    out = cube.walsh_hadamard(a)
    for row, got in zip(a, out):
        np.testing.assert_allclose(got, cube.walsh_hadamard(row))


def test_bad_length_rejected():
    with pytest.raises(CubeError):
        CubeFunction(3, [1.0] * 7)
    with pytest.raises(CubeError):
        CubeFunction(2, [1.0, np.nan, 0.0, 0.0])


def test_dimension_cap_configurable():
    with pytest.raises(CubeError):
        CubeFunction(3, np.zeros(8), max_dim=2)
    assert CubeFunction(3, np.zeros(8), max_dim=3).n == 3


def test_values_immutable(maj3):
    with pytest.raises(ValueError):
        maj3.values[0] = 5.0


@pytest.mark.parametrize(
    "F, expected",
    [
        (cube.fourier_transform(cube.majority(3)), 3),
        (cube.fourier_transform(cube.constant(4, 1.0)), 0),
        (FourierExpansion(4, np.zeros(16)), 0),
        (cube.fourier_transform(cube.parity(8, [1, 2, 3, 4, 5])), 5),
    ],
)
def test_degree(F, expected):
    assert cube.degree(F) == expected


def test_degree_ignores_dust():
    c = np.zeros(8)
    c[1] = 1.0
    c[7] = 1e-14
    assert cube.degree(FourierExpansion(3, c)) == 1
    assert cube.degree(FourierExpansion(3, c), tol=0.0) == 3


def test_range_width(maj3):
    assert cube.range_width(cube.parity(6)) == 2
    assert cube.range_width(cube.constant(3, 7.0)) == 0
    assert cube.range_width(maj3) == 2


def test_norms(maj3):
    assert cube.norm(cube.parity(5), 2) == 1
    assert cube.norm(cube.constant(2, 3.0), np.inf) == 3
    assert cube.norm(maj3, 1) == 1
    f = CubeFunction(1, [3.0, -4.0])
    assert cube.norm(f, 2) == pytest.approx(np.sqrt(12.5))
    with pytest.raises(CubeError):
        cube.norm(f, 0.5)


def test_flip_point():
    assert cube.flip_point(0, 0b1) == 1
    assert cube.flip_point(5, 0) == 5
    assert cube.flip_point(cube.flip_point(13, 6), 6) == 13


def test_point_encoding():
    # bit 1 <-> coordinate -1
    assert cube.point_from_signs([1, -1, -1]) == 0b110
    np.testing.assert_array_equal(cube.point_signs(0b110, 3), [1, -1, -1])
    assert cube.character(0b011, 0b010) == -1


def test_character_multiplicative_exhaustive():
    n = 5
    for S in range(1 << n):
        for x in range(1 << n):
            for y in range(0, 1 << n, 3):
                assert cube.character(S, x) * cube.character(S, y) == cube.character(S, x ^ y)


def test_evaluate_matches_table(rng):
    f = CubeFunction(6, rng.normal(size=64))
    F = cube.fourier_transform(f)
    for x in (0, 7, 63):
        assert cube.evaluate(F, x) == pytest.approx(f(x), abs=1e-12)


def test_json_round_trip(tmp_path, maj3):
    p = tmp_path / "f.json"
    p.write_text(json.dumps(cube.to_json(maj3)))
    np.testing.assert_array_equal(cube.load_function(p).values, maj3.values)
    F = cube.fourier_transform(maj3)
    q = tmp_path / "F.json"
    q.write_text(json.dumps(cube.to_json(F)))
    loaded = cube.load(q)
    assert isinstance(loaded, FourierExpansion)
    np.testing.assert_allclose(loaded.coeffs, F.coeffs)
    np.testing.assert_allclose(cube.load_function(q).values, maj3.values)


def test_json_malformed():
    with pytest.raises(CubeError):
        cube.from_json({"n": 2})
    with pytest.raises(CubeError):
        cube.from_json({"n": 1, "coeffs": [{"mask": 4, "value": 1.0}]})


# --- properties -------------------------------------------------------------

dims = st.integers(min_value=0, max_value=12)


@settings(max_examples=60, deadline=None)
@given(n=dims, seed=st.integers(0, 2**32 - 1))
def test_round_trip_and_parseval(n, seed):
    vals = np.random.default_rng(seed).uniform(-5, 5, size=1 << n)
    f = CubeFunction(n, vals)
    F = cube.fourier_transform(f)
    assert np.abs(cube.inverse_transform(F).values - vals).max() <= 1e-12
    assert abs(np.sum(F.coeffs**2) - np.mean(vals**2)) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(n=dims, seed=st.integers(0, 2**32 - 1), a=st.floats(-3, 3), b=st.floats(-3, 3))
def test_linearity(n, seed, a, b):
    r = np.random.default_rng(seed)
    f = CubeFunction(n, r.uniform(-1, 1, 1 << n))
    g = CubeFunction(n, r.uniform(-1, 1, 1 << n))
    lhs = cube.fourier_transform(a * f + b * g).coeffs
    rhs = a * cube.fourier_transform(f).coeffs + b * cube.fourier_transform(g).coeffs
    assert np.abs(lhs - rhs).max() <= 1e-12


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 10), seed=st.integers(0, 2**32 - 1), shift=st.floats(-10, 10))
def test_range_width_shift_invariant(n, seed, shift):
    f = CubeFunction(n, np.random.default_rng(seed).uniform(-1, 1, 1 << n))
    assert cube.range_width(f + shift) == pytest.approx(cube.range_width(f), abs=1e-12)
