"""Noise operator T_rho and rho-correlated sampling."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .cube import CubeError, CubeFunction, FourierExpansion, evaluate, fourier_transform, popcounts


def apply_noise(F: FourierExpansion, rho: float) -> FourierExpansion:
    """Scale p_hat(S) by rho^|S|.  Any finite rho is accepted, including rho > 1."""
    rho = float(rho)
    if not math.isfinite(rho):
        raise CubeError("rho must be finite")
    weights = rho ** popcounts(F.n).astype(np.float64)
    return F.with_coeffs(F.coeffs * weights)


def _check_rho(rho: float) -> None:
    if not -1.0 <= rho <= 1.0:
        raise CubeError(f"correlated sampling needs rho in [-1, 1], got {rho}")


def sample_correlated(x: int, n: int, rho: float, rng: np.random.Generator, size: int | None = None):
    """Draw y ~_rho x: each coordinate kept with probability (1 + rho) / 2.

    Returns one point index, or an array of ``size`` indices.
    """
    _check_rho(rho)
    m = 1 if size is None else size
    flips = rng.random((m, n)) >= (1.0 + rho) / 2.0
    weights = np.left_shift(1, np.arange(n, dtype=np.int64))
    y = np.bitwise_xor(flips.astype(np.int64) @ weights, x)
    return int(y[0]) if size is None else y


class NoiseCheck(NamedTuple):
    mc_estimate: float
    fourier_value: float
    z_score: float
    std_error: float


def noise_mc_check(f: CubeFunction, rho: float, x: int, samples: int, rng: np.random.Generator) -> NoiseCheck:
    """Compare a Monte Carlo estimate of E_{y ~_rho x} f(y) to (T_rho f)(x)."""
    if samples <= 0:
        raise CubeError("samples must be positive")
    _check_rho(rho)
    ys = sample_correlated(x, f.n, rho, rng, size=samples)
    vals = f.values[ys]
    mc = math.fsum(vals) / samples
    exact = evaluate(apply_noise(fourier_transform(f), rho), x)
    spread = float(np.ptp(vals))
    se = float(vals.std(ddof=1) / math.sqrt(samples)) if samples > 1 and spread > 0 else 0.0
    if se > 0:
        z = (mc - exact) / se
    else:
        # degenerate sample: all draws equal, so mc is exact up to rounding
        z = 0.0 if math.isclose(mc, exact, rel_tol=1e-12, abs_tol=1e-12) else math.inf
    return NoiseCheck(mc, exact, z, se)
