"""Numeric replay of the degree bound on L1 influence for concrete functions.

For a subset S the polynomial q_S keeps the monomials meeting S in exactly one
coordinate.  The quantity B averages, over a random S and uniform x off S,

    sum_{i in S} | sum_{R : R & S = {i}} p_hat(R) chi_{R - i}(x) |.

Choosing x_i on S as the sign of the inner sum turns the bracket into q_S at
that completed point, so B is at most max |q_S|.  In the other direction,
Jensen over the random S gives B >= c * Inf / d (homogeneous case, S at rate
1/d) or B >= c * Inf / d^2 (general case, S at rate 1/d^2 with coefficients
weighted by rho'^|R|, rho' = 1 / (1 - 1/d^2)).

The auxiliary variables z used for the rho' cancellation take values in
{0, 1}, not {-1, 1}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import NamedTuple

import numpy as np

from ._parallel import ordered_map
from .certificate import v_alpha
from .cube import (
    CubeFunction,
    FourierExpansion,
    degree,
    fourier_transform,
    inverse_transform,
    popcounts,
    range_width,
    walsh_hadamard,
)
from .influence import total_l1
from .noise import apply_noise

CHUNK = 4096
EXACT_MAX_N = 10
MAX_SHIFT_SET = 20
LOWER_ENVELOPE = 0.1
UPPER_ENVELOPE = 100.0


class TraceError(ValueError):
    pass


def _as_expansion(f) -> FourierExpansion:
    return f if isinstance(f, FourierExpansion) else fourier_transform(f)


def q_S(F: FourierExpansion, S: int) -> FourierExpansion:
    """Monomials R with |R & S| == 1."""
    masks = np.arange(1 << F.n, dtype=np.uint64)
    keep = np.bitwise_count(masks & np.uint64(S)) == 1
    return F.with_coeffs(np.where(keep, F.coeffs, 0.0))


def rho_prime(d: int) -> float:
    if d < 2:
        raise TraceError("rho' = 1 / (1 - 1/d^2) needs d >= 2")
    return d * d / (d * d - 1.0)


def is_homogeneous(F: FourierExpansion, tol: float = 1e-12) -> bool:
    S = F.support(tol)
    if S.size == 0:
        return True
    sizes = np.bitwise_count(S.astype(np.uint64))
    return bool(np.all(sizes == sizes[0]))


# ---------------------------------------------------------------------------
# Expected shift identity


def _submasks(S: int):
    sub = S
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & S


def expected_shift_identity_gap(f: CubeFunction, S: int, alpha: float) -> float:
    """max_x |E_{S'}[f(x) - f(x^{S'})] - 2 sum_R f_hat(R) v_alpha(|R & S|) chi_R(x)|.

    S' is a rate-alpha random subset of S; the left side enumerates all of
    them with their exact probabilities.
    """
    k = S.bit_count()
    if k > MAX_SHIFT_SET:
        raise TraceError(f"|S|={k} exceeds {MAX_SHIFT_SET} for subset enumeration")
    if not 0.0 <= alpha <= 1.0:
        raise TraceError(f"alpha={alpha} outside [0, 1]")
    idx = np.arange(1 << f.n)
    lhs = np.zeros(1 << f.n)
    for sub in _submasks(S):
        j = sub.bit_count()
        w = alpha**j * (1.0 - alpha) ** (k - j)
        if w:
            lhs += w * (f.values - f.values[idx ^ sub])
    F = fourier_transform(f)
    meet = np.bitwise_count(np.arange(1 << f.n, dtype=np.uint64) & np.uint64(S)).astype(np.int64)
    v = np.concatenate([[0.0], v_alpha(alpha, max(k, 1))])
    rhs = walsh_hadamard(2.0 * F.coeffs * v[meet])
    return float(np.abs(lhs - rhs).max())


# ---------------------------------------------------------------------------
# The B quantity


class BEstimate(NamedTuple):
    mean: float
    std_error: float
    trials: int


def _inner_sums(masks: np.ndarray, coeffs: np.ndarray, n: int, S: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Per trial: sum_{i in S} |sum_{R & S = {i}} c_R chi_{R - i}(x)|."""
    T = S.shape[0]
    if masks.size == 0:
        return np.zeros(T)
    inter = masks[None, :] & S[:, None]
    single = np.bitwise_count(inter) == 1
    rest = (masks[None, :] ^ inter) & x[:, None]
    chi = 1.0 - 2.0 * (np.bitwise_count(rest) & 1)
    vals = np.where(single, coeffs[None, :] * chi, 0.0)
    coord = np.where(single, np.log2(np.maximum(inter, 1)).astype(np.int64), 0)
    rows = np.broadcast_to(np.arange(T)[:, None], inter.shape)
    acc = np.zeros((T, n))
    np.add.at(acc, (rows[single], coord[single]), vals[single])
    return np.abs(acc).sum(axis=1)


def _sample_chunk(masks, coeffs, n, rate, seed, size) -> np.ndarray:
    rng = np.random.default_rng(seed)
    weights = np.left_shift(np.uint64(1), np.arange(n, dtype=np.uint64))
    S = ((rng.random((size, n)) < rate).astype(np.uint64) * weights).sum(axis=1).astype(np.uint64)
    x = rng.integers(0, 1 << n, size=size, dtype=np.uint64)
    return _inner_sums(masks, coeffs, n, S, x)


def _monte_carlo_B(F: FourierExpansion, rate: float, weight_rho: float, trials: int, rng, threads) -> BEstimate:
    if trials < 2:
        raise TraceError("need at least two trials")
    masks = F.support(0.0).astype(np.uint64)
    coeffs = F.coeffs[masks.astype(np.int64)] * weight_rho ** np.bitwise_count(masks).astype(np.float64)
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    nchunks = -(-trials // CHUNK)
    seeds = np.random.SeedSequence(int(gen.integers(0, 2**63 - 1))).spawn(nchunks)
    sizes = [min(CHUNK, trials - j * CHUNK) for j in range(nchunks)]
    parts = ordered_map(
        lambda js: _sample_chunk(masks, coeffs, F.n, rate, js[0], js[1]), list(zip(seeds, sizes)), threads
    )
    vals = np.concatenate(parts)
    return BEstimate(float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(trials)), trials)


def _require_degree(F: FourierExpansion, d: int, homogeneous: bool) -> None:
    if d < 1:
        raise TraceError("d must be >= 1")
    if F.support(1e-12).size == 0:
        return
    if homogeneous:
        sizes = np.bitwise_count(F.support(1e-12).astype(np.uint64))
        if np.any(sizes != d):
            raise TraceError(f"input is not homogeneous of degree {d}")
    elif degree(F) > d:
        raise TraceError(f"input degree {degree(F)} exceeds d={d}")


def estimate_B_homogeneous(f, d: int, trials: int, rng, threads: int | None = 1) -> BEstimate:
    """Monte Carlo B with S at rate 1/d; input must be homogeneous of degree d."""
    F = _as_expansion(f)
    _require_degree(F, d, homogeneous=True)
    return _monte_carlo_B(F, 1.0 / d, 1.0, trials, rng, threads)


def estimate_B_general(f, d: int, trials: int, rng, threads: int | None = 1) -> BEstimate:
    """Monte Carlo B with S at rate 1/d^2 and coefficients times rho'^|R|."""
    F = _as_expansion(f)
    _require_degree(F, d, homogeneous=False)
    return _monte_carlo_B(F, 1.0 / (d * d), rho_prime(d), trials, rng, threads)


def exact_B(f, d: int, homogeneous: bool, max_n: int = EXACT_MAX_N) -> float:
    """B by enumerating every S with its probability and every x."""
    F = _as_expansion(f)
    _require_degree(F, d, homogeneous)
    if homogeneous:
        return _exact_B(F, 1.0 / d, 1.0, max_n)
    return _exact_B(F, 1.0 / (d * d), rho_prime(d), max_n)


def _exact_B(F: FourierExpansion, rate: float, w: float, max_n: int) -> float:
    n = F.n
    if n > max_n:
        raise TraceError(f"exact B enumerates 4^n terms; n={n} exceeds {max_n}")
    masks = np.arange(1 << n)
    coeffs = F.coeffs * w ** popcounts(n).astype(np.float64)
    total = []
    for S in range(1, 1 << n):
        k = S.bit_count()
        prob = rate**k * (1.0 - rate) ** (n - k)
        if prob == 0.0:
            continue
        members = [i for i in range(n) if (S >> i) & 1]
        parts = np.zeros((k, 1 << n))
        meet = masks & S
        for row, i in enumerate(members):
            sel = meet == (1 << i)
            parts[row, masks[sel] ^ (1 << i)] = coeffs[sel]
        inner = np.abs(walsh_hadamard(parts)).mean(axis=1).sum()
        total.append(prob * inner)
    return math.fsum(total)


def sign_completion(f, S: int, x: int, weight_rho: float = 1.0) -> tuple[int, float]:
    """Set x_i, i in S, to the sign of its bracket; return (point, inner sum).

    At the returned point q_S (weighted by weight_rho^|R|) equals the inner sum.
    """
    F = _as_expansion(f)
    masks = F.support(0.0).astype(np.uint64)
    coeffs = F.coeffs[masks.astype(np.int64)] * weight_rho ** np.bitwise_count(masks).astype(np.float64)
    y = x & ~S
    inner = 0.0
    for i in range(F.n):
        bit = 1 << i
        if not S & bit:
            continue
        sel = (masks & np.uint64(S)) == np.uint64(bit)
        rest = (masks[sel] ^ np.uint64(bit)) & np.uint64(x)
        val = float(np.sum(coeffs[sel] * (1.0 - 2.0 * (np.bitwise_count(rest) & 1))))
        if val < 0:
            y |= bit
        inner += abs(val)
    return y, inner


def rho_prime_cancellation(d: int, k: int) -> Fraction:
    """E_z[rho'^k chi_R(z)] for |R| = k, z_i in {0, 1} with Pr[z_i = 0] = 1/d^2.

    Exact rational enumeration over the 2^k values of z restricted to R.
    """
    rho = Fraction(d * d, d * d - 1)
    p0 = Fraction(1, d * d)
    total = Fraction(0)
    for z in product((0, 1), repeat=k):
        prob = Fraction(1)
        for zi in z:
            prob *= p0 if zi == 0 else 1 - p0
        total += prob * math.prod(z)
    return rho**k * total


# ---------------------------------------------------------------------------
# End-to-end trace


@dataclass
class TraceReport:
    d: int
    n: int
    mode: str
    inf_total: float
    B_estimate: float
    B_std_error: float
    qS_max: float
    bound_dlogd: float
    lower_ratio: float
    upper_ratio: float
    B_exact: float | None = None
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _qS_max(F: FourierExpansion, rate: float, weight_rho: float, samples: int, rng: np.random.Generator) -> float:
    weighted = apply_noise(F, weight_rho) if weight_rho != 1.0 else F
    best = 0.0
    for _ in range(samples):
        S = int(((rng.random(F.n) < rate) * (1 << np.arange(F.n))).sum())
        vals = inverse_transform(q_S(weighted, S)).values
        best = max(best, float(np.abs(vals).max()))
    return best


def theorem_trace(
    f: CubeFunction,
    *,
    trials: int = 20000,
    rng=0,
    homogeneous: bool | None = None,
    qS_samples: int = 64,
    exact_max_n: int = EXACT_MAX_N,
    threads: int | None = 1,
) -> TraceReport:
    """Compute Inf, B, max |q_S| for f and check the inequality chain.

    Contracts (acceptance envelopes, not sharp constants):
    B >= 0.1 Inf / d (homogeneous) or 0.1 Inf / d^2 (general), and
    B <= 100 A_p d ln(d + 2).  Degree-one inputs use S = [n], where B is Inf.
    """
    F = fourier_transform(f)
    d = degree(F)
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    inf = total_l1(f, threads)
    A = range_width(f)
    if d == 0:
        return TraceReport(0, f.n, "constant", inf, 0.0, 0.0, 0.0, 0.0, math.nan, math.nan)
    if homogeneous is None:
        homogeneous = is_homogeneous(F)
    if d == 1:
        mode, rate, w, scale = "degree-one", 1.0, 1.0, 1.0
    elif homogeneous:
        mode, rate, w, scale = "homogeneous", 1.0 / d, 1.0, 1.0 / d
    else:
        mode, rate, w, scale = "general", 1.0 / (d * d), rho_prime(d), 1.0 / (d * d)
    if d > 1:
        _require_degree(F, d, homogeneous)
    est = _monte_carlo_B(F, rate, w, trials, gen, threads)
    qmax = _qS_max(F, rate, w, qS_samples, gen)
    bound = A * d * math.log(d + 2)
    lower = inf * scale
    report = TraceReport(
        d=d,
        n=f.n,
        mode=mode,
        inf_total=inf,
        B_estimate=est.mean,
        B_std_error=est.std_error,
        qS_max=qmax,
        bound_dlogd=bound,
        lower_ratio=est.mean / lower if lower > 0 else math.inf,
        upper_ratio=qmax / bound if bound > 0 else math.nan,
    )
    if f.n <= exact_max_n:
        report.B_exact = _exact_B(F, rate, w, exact_max_n)
    if est.mean < 0:
        report.violations.append(f"B estimate {est.mean} is negative")
    if est.mean < LOWER_ENVELOPE * lower:
        report.violations.append(f"B={est.mean:.6g} below {LOWER_ENVELOPE} * Inf * {scale:.4g}")
    if est.mean > UPPER_ENVELOPE * bound:
        report.violations.append(f"B={est.mean:.6g} above {UPPER_ENVELOPE} * A_p d ln(d+2) = {UPPER_ENVELOPE * bound:.6g}")
    return report
