"""Chebyshev growth outside [-1, 1]."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P

GRID_POINTS = 1024
HYPOTHESIS_TOL = 1e-9


class HypothesisError(ValueError):
    """Polynomial is not bounded by 1 on [-1, 1] (checked on a grid)."""


def chebyshev_int(d: int, t: int) -> int:
    """T_d(t) for integer t by the integer three-term recurrence (exact)."""
    if d < 0:
        raise ValueError("degree must be >= 0")
    prev, cur = 1, t
    if d == 0:
        return prev
    for _ in range(d - 1):
        prev, cur = cur, 2 * t * cur - prev
    return cur


def _recurrence(d: int, t: float) -> float:
    prev, cur = 1.0, t
    if d == 0:
        return prev
    for _ in range(d - 1):
        prev, cur = cur, 2.0 * t * cur - prev
    return cur


def _closed_form(d: int, t: float) -> float:
    # ((t + s)^d + (t - s)^d) / 2 with s = sqrt(t^2 - 1) equals cosh(d log(t + s))
    # for t >= 1; log1p on (t - 1) + s avoids cancellation near t = 1.
    a = abs(t)
    s = math.sqrt((a - 1.0) * (a + 1.0))
    try:
        val = math.cosh(d * math.log1p((a - 1.0) + s))
    except OverflowError:
        val = math.inf
    return -val if (t < 0 and d % 2) else val


def chebyshev_eval(d: int, t: float) -> float:
    """T_d(t): recurrence on [-1, 1], closed form outside.

    Python ints go through the exact integer recurrence.
    """
    if d < 0:
        raise ValueError("degree must be >= 0")
    if isinstance(t, (int, np.integer)) and not isinstance(t, bool):
        return float(chebyshev_int(d, int(t)))
    t = float(t)
    if abs(t) <= 1.0:
        return _recurrence(d, t)
    return _closed_form(d, t)


def paturi_bound(d: int, gamma: float) -> float:
    """exp(2 d sqrt(2 gamma + gamma^2)), an upper bound for T_d(1 + gamma)."""
    if gamma < 0:
        raise ValueError(f"gamma={gamma} must be >= 0")
    try:
        return math.exp(2.0 * d * math.sqrt(2.0 * gamma + gamma * gamma))
    except OverflowError:
        return math.inf


def extrapolation_point(d: int) -> float:
    """1 / (1 - 1/d^2), written as d^2 / (d^2 - 1)."""
    return d * d / (d * d - 1.0)


def extremal_growth_check(d: int) -> tuple[float, float, bool]:
    if d < 2:
        raise ValueError("extremal growth check needs d >= 2")
    value = chebyshev_eval(d, extrapolation_point(d))
    bound = paturi_bound(d, 1.0 / (d * d - 1.0))
    return value, bound, value <= bound


def chebyshev_nodes(m: int = GRID_POINTS) -> np.ndarray:
    k = np.arange(m)
    return np.cos((2 * k + 1) * np.pi / (2 * m))


def grid_sup(coeffs: Sequence[float], m: int = GRID_POINTS) -> float:
    """max |q| over m Chebyshev nodes plus the endpoints +-1."""
    pts = np.concatenate([chebyshev_nodes(m), [-1.0, 1.0]])
    return float(np.abs(P.polyval(pts, np.asarray(coeffs, dtype=np.float64))).max())


def extrapolation_bound_check(coeffs: Sequence[float], d: int) -> bool:
    """|q(rho')| <= T_d(rho') + 1e-8 for q bounded by 1 on [-1, 1].

    ``coeffs`` are monomial coefficients in increasing power order.
    """
    if d < 2:
        raise ValueError("extrapolation check needs d >= 2")
    c = np.trim_zeros(np.asarray(coeffs, dtype=np.float64), "b")
    if c.size - 1 > d:
        raise ValueError(f"polynomial degree {c.size - 1} exceeds d={d}")
    sup = grid_sup(c)
    if sup > 1.0 + HYPOTHESIS_TOL:
        raise HypothesisError(f"max |q| on [-1, 1] grid is {sup:.12g} > 1")
    rho = extrapolation_point(d)
    return abs(float(P.polyval(rho, c))) <= chebyshev_eval(d, rho) + 1e-8
