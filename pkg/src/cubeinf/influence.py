"""L1 and L2 influences of real-valued cube functions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._parallel import ordered_map
from .cube import (
    CubeError,
    CubeFunction,
    FourierExpansion,
    fourier_transform,
    fsum,
    inverse_transform,
    popcounts,
    walsh_hadamard,
)


@dataclass(frozen=True)
class InfluenceProfile:
    per_coordinate_l1: tuple[float, ...]
    per_coordinate_l2: tuple[float, ...]
    total_l1: float
    total_l2: float

    @property
    def n(self) -> int:
        return len(self.per_coordinate_l1)


def _halves(values: np.ndarray, i: int) -> tuple[np.ndarray, np.ndarray]:
    # split the table into the x_i = +1 and x_i = -1 halves, paired by x^i
    v = values.reshape(-1, 2, 1 << (i - 1))
    return v[:, 0, :], v[:, 1, :]


def _check_coord(f, i: int) -> None:
    if not 1 <= i <= f.n:
        raise CubeError(f"coordinate {i} outside [1, {f.n}]")


def l1_influence(f: CubeFunction, i: int) -> float:
    """E_x |f(x) - f(x^i)| / 2, with coordinates numbered from 1."""
    _check_coord(f, i)
    a, b = _halves(f.values, i)
    # each unordered pair {x, x^i} appears twice among the 2^n points
    return fsum(np.abs(a - b)) / (2 * a.size)


def l2_influence(f: CubeFunction, i: int) -> float:
    """E_x ((f(x) - f(x^i)) / 2)^2."""
    _check_coord(f, i)
    a, b = _halves(f.values, i)
    return fsum(((a - b) / 2) ** 2) / a.size


def total_l1(f: CubeFunction, threads: int | None = 1) -> float:
    return fsum(np.array(ordered_map(lambda i: l1_influence(f, i), range(1, f.n + 1), threads)))


def total_l1_via_fourier(F: FourierExpansion, threads: int | None = 1) -> float:
    """sum_i E_x |sum_{R contains i} p_hat(R) chi_R(x)|.

    This is the derivative form of the L1 influence; it must agree with
    ``total_l1`` of the value table.
    """
    masks = np.arange(1 << F.n)

    def one(i: int) -> float:
        part = np.where(masks & (1 << (i - 1)), F.coeffs, 0.0)
        return fsum(np.abs(walsh_hadamard(part))) / part.size

    return fsum(np.array(ordered_map(one, range(1, F.n + 1), threads)))


def total_l2_via_fourier(F: FourierExpansion) -> float:
    """sum_S |S| p_hat(S)^2."""
    return fsum(popcounts(F.n) * F.coeffs**2)


def influence_profile(f: CubeFunction, threads: int | None = 1) -> InfluenceProfile:
    coords = range(1, f.n + 1)
    l1 = ordered_map(lambda i: l1_influence(f, i), coords, threads)
    l2 = ordered_map(lambda i: l2_influence(f, i), coords, threads)
    return InfluenceProfile(
        per_coordinate_l1=tuple(l1),
        per_coordinate_l2=tuple(l2),
        total_l1=fsum(np.array(l1)),
        total_l2=fsum(np.array(l2)),
    )


def random_bounded_polynomial(n: int, d: int, seed: int | Sequence[int]) -> CubeFunction:
    """Random function with degree <= d and sup-norm <= 1.

    Uniform values in [-1, 1] are projected onto degree <= d, then divided by
    max(1, sup-norm).  Projection can push values outside [-1, 1], which the
    rescale undoes without touching the degree.  This is one convenient
    ensemble, not a canonical distribution over bounded low-degree functions.
    """
    if not 0 <= d <= n:
        raise CubeError(f"degree d={d} outside [0, n={n}]")
    rng = np.random.default_rng(seed)
    f = CubeFunction(n, rng.uniform(-1.0, 1.0, size=1 << n))
    F = fourier_transform(f)
    coeffs = np.where(popcounts(n) <= d, F.coeffs, 0.0)
    g = inverse_transform(F.with_coeffs(coeffs))
    return g.with_values(g.values / max(1.0, float(np.abs(g.values).max())))


def random_boolean_function(n: int, seed: int | Sequence[int]) -> CubeFunction:
    rng = np.random.default_rng(seed)
    return CubeFunction(n, rng.choice([-1.0, 1.0], size=1 << n))
