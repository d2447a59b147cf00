"""Gamma-grid certificates: sum_i x_i gamma_i^k = [k == 1] for k = 1..d.

The system matrix has entries gamma_i^k, a column-scaled Vandermonde matrix,
so its solution is available in closed form:

    x_k = (1 / gamma_k) * prod_{j != k} gamma_j / (gamma_j - gamma_k)

(the Lagrange basis polynomial for node gamma_k evaluated at 0, divided by
gamma_k).  The products are accumulated as log-magnitudes with a separate
sign, and the result is checked by a compensated residual evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

CERTIFIED_DMAX = 64
RESIDUAL_TOL = 1e-8


class ConditioningError(ArithmeticError):
    def __init__(self, d: int, residual: float):
        super().__init__(f"certificate residual {residual:.3e} exceeds {RESIDUAL_TOL:g} at d={d}")
        self.d = d
        self.residual = residual


@dataclass(frozen=True)
class GammaCertificate:
    d: int
    gammas: tuple[float, ...]
    x: tuple[float, ...]
    residual_inf: float
    l1_norm: float
    harmonic_bound: float

    @property
    def ratio(self) -> float:
        """l1_norm / (d ln(d + 1))."""
        return self.l1_norm / (self.d * math.log(self.d + 1))


def v_alpha(alpha: float, d: int) -> np.ndarray:
    """Entry k is Pr[|P & [k]| odd] for P a rate-alpha random subset."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha={alpha} outside [0, 1]")
    k = np.arange(1, d + 1, dtype=np.float64)
    return (1.0 - (1.0 - 2.0 * alpha) ** k) / 2.0


def v_gamma_prime(gamma: float, d: int) -> np.ndarray:
    """Entry k is gamma^k."""
    return float(gamma) ** np.arange(1, d + 1, dtype=np.float64)


def gamma_grid(d: int) -> list[float]:
    """Nodes -1/2 + ... on the negative side, 1/d upward on the positive side.

    For odd d the largest node is 1/2 + 1/(2d), so d = 1 gives [1].
    """
    if d < 1:
        raise ValueError("gamma grid needs d >= 1")
    if d % 2 == 0:
        return [-0.5 + (i - 1) / d if i <= d // 2 else (i - d / 2) / d for i in range(1, d + 1)]
    return [-0.5 + (i - 0.5) / d if i <= (d - 1) // 2 else (i + 0.5 - d / 2) / d for i in range(1, d + 1)]


def _log_abs_prod(values) -> tuple[float, int]:
    sign = 1
    logs = []
    for v in values:
        if v < 0:
            sign = -sign
        logs.append(math.log(abs(v)))
    return math.fsum(logs), sign


def product_gap(gammas) -> list[float]:
    """log|prod_{j!=k}(gamma_j - gamma_k)| - log|prod_{j!=k} gamma_j| for each k.

    Non-negative entries mean the node products are dominated by the gap
    products, which is what bounds |x_k| by 1/|gamma_k|.
    """
    out = []
    for k, gk in enumerate(gammas):
        others = [g for j, g in enumerate(gammas) if j != k]
        out.append(_log_abs_prod(g - gk for g in others)[0] - _log_abs_prod(others)[0])
    return out


def solve_vandermonde(gammas) -> list[float]:
    """Closed-form solution of sum_i x_i gamma_i^k = [k == 1], k = 1..d."""
    x = []
    for k, gk in enumerate(gammas):
        others = [g for j, g in enumerate(gammas) if j != k]
        num_log, num_sign = _log_abs_prod(others)
        den_log, den_sign = _log_abs_prod([g - gk for g in others] + [gk])
        x.append(num_sign * den_sign * math.exp(num_log - den_log))
    return x


def residual(gammas, x) -> float:
    """max_k |sum_i x_i gamma_i^k - [k == 1]| with exactly-rounded row sums."""
    d = len(gammas)
    worst = 0.0
    for k in range(1, d + 1):
        row = math.fsum([xi * gi**k for xi, gi in zip(x, gammas)] + [-1.0 if k == 1 else 0.0])
        worst = max(worst, abs(row))
    return worst


def solve_certificate(d: int, strict: bool | None = None) -> GammaCertificate:
    """Build the certificate for degree d.

    Residuals above 1e-8 raise ConditioningError for d <= 64; beyond that the
    result is best-effort and returned with its residual unless ``strict``.
    """
    if d < 1:
        raise ValueError("certificate needs d >= 1")
    gammas = gamma_grid(d)
    x = solve_vandermonde(gammas)
    res = residual(gammas, x)
    if strict is None:
        strict = d <= CERTIFIED_DMAX
    if strict and not res <= RESIDUAL_TOL:
        raise ConditioningError(d, res)
    return GammaCertificate(
        d=d,
        gammas=tuple(gammas),
        x=tuple(x),
        residual_inf=res,
        l1_norm=math.fsum(abs(v) for v in x),
        harmonic_bound=math.fsum(1.0 / abs(g) for g in gammas),
    )


def certificate_growth_table(d_max: int) -> list[GammaCertificate]:
    return [solve_certificate(d) for d in range(1, d_max + 1)]
