"""Dense functions on the Boolean hypercube {-1, 1}^n.

A point is an integer index in [0, 2^n).  Bit i of the index holds coordinate
x_{i+1}: a 0 bit means x = +1 and a 1 bit means x = -1.  With this encoding
the Walsh character chi_S(x) is (-1)^popcount(S & x), so every transform here
is a plain Walsh-Hadamard butterfly.

Fourier coefficients use the expectation convention

    p_hat(S) = 2^-n * sum_x p(x) chi_S(x),    p(x) = sum_S p_hat(S) chi_S(x).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

MAX_DIM = 26


class CubeError(ValueError):
    """Malformed cube data or out-of-range parameter."""


def _frozen(values, n: int, max_dim: int | None) -> np.ndarray:
    cap = MAX_DIM if max_dim is None else max_dim
    if not 0 <= n <= cap:
        raise CubeError(f"dimension n={n} outside [0, {cap}]")
    arr = np.array(values, dtype=np.float64).reshape(-1)
    if arr.shape[0] != 1 << n:
        raise CubeError(f"expected {1 << n} entries for n={n}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise CubeError("values must be finite")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class CubeFunction:
    """Value table of p: {-1,1}^n -> R indexed by cube point."""

    n: int
    values: np.ndarray

    def __init__(self, n: int, values, *, max_dim: int | None = None):
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "values", _frozen(values, int(n), max_dim))

    def __len__(self) -> int:
        return self.values.shape[0]

    def __call__(self, x: int) -> float:
        return float(self.values[x])

    def with_values(self, values) -> "CubeFunction":
        return CubeFunction(self.n, values, max_dim=self.n)

    def __add__(self, other):
        if isinstance(other, CubeFunction):
            _same_dim(self, other)
            return self.with_values(self.values + other.values)
        return self.with_values(self.values + float(other))

    def __mul__(self, scalar):
        return self.with_values(self.values * float(scalar))

    __rmul__ = __mul__

    def __sub__(self, other):
        return self + (-1.0) * other if isinstance(other, CubeFunction) else self + (-float(other))


@dataclass(frozen=True, eq=False)
class FourierExpansion:
    """Fourier-Walsh coefficients indexed by subset mask S."""

    n: int
    coeffs: np.ndarray

    def __init__(self, n: int, coeffs, *, max_dim: int | None = None):
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "coeffs", _frozen(coeffs, int(n), max_dim))

    def __getitem__(self, mask: int) -> float:
        return float(self.coeffs[mask])

    def with_coeffs(self, coeffs) -> "FourierExpansion":
        return FourierExpansion(self.n, coeffs, max_dim=self.n)

    def support(self, tol: float = 0.0) -> np.ndarray:
        """Masks whose coefficient exceeds ``tol`` in magnitude."""
        return np.flatnonzero(np.abs(self.coeffs) > tol)

    def __add__(self, other: "FourierExpansion") -> "FourierExpansion":
        _same_dim(self, other)
        return self.with_coeffs(self.coeffs + other.coeffs)

    def __mul__(self, scalar):
        return self.with_coeffs(self.coeffs * float(scalar))

    __rmul__ = __mul__


def _same_dim(a, b) -> None:
    if a.n != b.n:
        raise CubeError(f"dimension mismatch: {a.n} vs {b.n}")


def popcounts(n: int) -> np.ndarray:
    """|S| for every mask S in [0, 2^n)."""
    return np.bitwise_count(np.arange(1 << n, dtype=np.uint64)).astype(np.int64)


def character(S: int, x: int) -> int:
    """chi_S evaluated at point x, as +1 or -1."""
    return -1 if (S & x).bit_count() & 1 else 1


def flip_point(x: int, S: int) -> int:
    """The point x^S: x with every coordinate in S negated."""
    return x ^ S


def point_from_signs(signs: Sequence[int]) -> int:
    """Index of the point (x_1, ..., x_n) given as a sequence of +-1."""
    idx = 0
    for i, s in enumerate(signs):
        if s == -1:
            idx |= 1 << i
        elif s != 1:
            raise CubeError(f"coordinate {i + 1} is {s}, expected +1 or -1")
    return idx


def point_signs(x: int, n: int) -> np.ndarray:
    return 1 - 2 * ((x >> np.arange(n)) & 1)


def walsh_hadamard(a: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along the last axis.

    Works on a copy; leading axes are treated as a batch.
    """
    out = np.array(a, dtype=np.float64, copy=True)
    size = out.shape[-1]
    if size & (size - 1):
        raise CubeError(f"length {size} is not a power of two")
    batch = out.shape[:-1]
    h = 1
    while h < size:
        v = out.reshape(*batch, size // (2 * h), 2, h)
        lo = v[..., 0, :].copy()
        hi = v[..., 1, :]
        v[..., 0, :] += hi
        hi *= -1
        hi += lo
        h *= 2
    return out


def fourier_transform(f: CubeFunction) -> FourierExpansion:
    return FourierExpansion(f.n, walsh_hadamard(f.values) / float(1 << f.n), max_dim=max(f.n, MAX_DIM))


def inverse_transform(F: FourierExpansion) -> CubeFunction:
    return CubeFunction(F.n, walsh_hadamard(F.coeffs), max_dim=max(F.n, MAX_DIM))


def evaluate(F: FourierExpansion, x: int, tol: float = 0.0) -> float:
    """Evaluate the expansion at one point without a full transform."""
    S = F.support(tol)
    signs = 1 - 2 * (np.bitwise_count(S.astype(np.uint64) & np.uint64(x)) & 1).astype(np.int64)
    return math.fsum((F.coeffs[S] * signs).tolist())


def degree(F: FourierExpansion, tol: float = 1e-12) -> int:
    if tol < 0:
        raise CubeError("tol must be non-negative")
    S = F.support(tol)
    if S.size == 0:
        return 0
    return int(np.bitwise_count(S.astype(np.uint64)).max())


def range_width(f: CubeFunction) -> float:
    return float(f.values.max() - f.values.min())


def norm(f: CubeFunction, q: float = 2.0) -> float:
    """(E_x |f(x)|^q)^(1/q) under the uniform measure; max |f| for q = inf."""
    if math.isinf(q) and q > 0:
        return float(np.abs(f.values).max())
    if not q >= 1:
        raise CubeError(f"norm order q={q} must be >= 1")
    a = np.abs(f.values)
    if q == 1:
        return fsum(a) / len(a)
    return (fsum(a**q) / len(a)) ** (1.0 / q)


def fsum(a: np.ndarray, chunk: int = 1 << 16) -> float:
    """Compensated sum of a float array.

    Chunks are summed exactly-rounded with math.fsum, then the partial sums.
    """
    flat = np.asarray(a, dtype=np.float64).reshape(-1)
    if flat.size <= chunk:
        return math.fsum(flat.tolist())
    return math.fsum(math.fsum(flat[i : i + chunk].tolist()) for i in range(0, flat.size, chunk))


# ---------------------------------------------------------------------------
# Common functions


def from_callable(n: int, fn: Callable[[np.ndarray], float]) -> CubeFunction:
    """Tabulate ``fn`` applied to the +-1 coordinate vector of every point."""
    return CubeFunction(n, [fn(point_signs(x, n)) for x in range(1 << n)])


def constant(n: int, c: float) -> CubeFunction:
    return CubeFunction(n, np.full(1 << n, float(c)))


def parity(n: int, S: int | Iterable[int] | None = None) -> CubeFunction:
    """chi_S on n variables.  ``S`` is a mask or 1-based coordinates; default [n]."""
    mask = subset_mask(S, n)
    x = np.arange(1 << n, dtype=np.uint64)
    return CubeFunction(n, 1.0 - 2.0 * (np.bitwise_count(x & np.uint64(mask)) & 1))


def majority(n: int) -> CubeFunction:
    if n % 2 == 0:
        raise CubeError("majority needs an odd number of variables")
    ones = popcounts(n)
    return CubeFunction(n, np.where(2 * ones < n, 1.0, -1.0))


def subset_mask(S: int | Iterable[int] | None, n: int) -> int:
    if S is None:
        return (1 << n) - 1
    if isinstance(S, (int, np.integer)):
        mask = int(S)
    else:
        mask = 0
        for i in S:
            if not 1 <= i <= n:
                raise CubeError(f"coordinate {i} outside [1, {n}]")
            mask |= 1 << (i - 1)
    if mask >> n:
        raise CubeError(f"mask {mask:#x} has bits beyond n={n}")
    return mask


# ---------------------------------------------------------------------------
# JSON I/O


def to_json(obj: CubeFunction | FourierExpansion, tol: float = 0.0) -> dict:
    if isinstance(obj, CubeFunction):
        return {"n": obj.n, "values": obj.values.tolist()}
    return {
        "n": obj.n,
        "coeffs": [{"mask": int(S), "value": float(obj.coeffs[S])} for S in obj.support(tol)],
    }


def from_json(doc: dict, *, max_dim: int | None = None) -> CubeFunction | FourierExpansion:
    try:
        n = int(doc["n"])
        if "values" in doc:
            return CubeFunction(n, doc["values"], max_dim=max_dim)
        coeffs = np.zeros(1 << n)
        for entry in doc["coeffs"]:
            mask = int(entry["mask"])
            if not 0 <= mask < 1 << n:
                raise CubeError(f"mask {mask} outside [0, 2^{n})")
            coeffs[mask] += float(entry["value"])
        return FourierExpansion(n, coeffs, max_dim=max_dim)
    except (KeyError, TypeError) as exc:
        raise CubeError(f"malformed cube document: {exc}") from exc


def load(path: str | Path, *, max_dim: int | None = None) -> CubeFunction | FourierExpansion:
    with open(path) as fh:
        return from_json(json.load(fh), max_dim=max_dim)


def load_function(path: str | Path, *, max_dim: int | None = None) -> CubeFunction:
    """Load either JSON form and return the value table."""
    obj = load(path, max_dim=max_dim)
    return obj if isinstance(obj, CubeFunction) else inverse_transform(obj)
