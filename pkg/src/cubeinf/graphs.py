"""Cut deviation of graphs and the degree-2 cut polynomial.

Vertices are 0-based internally; vertex v is cube coordinate v + 1 and bit v
of a vertex mask.  Graph files use 1-based vertex labels.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Iterable

import numba
import numpy as np

from . import _kernels
from ._parallel import ordered_map, resolve_threads
from .cube import FourierExpansion, fsum

EXHAUSTIVE_MAX_N = 24


class GraphError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph stored as one neighbour bitset per vertex."""

    n: int
    adjacency: tuple[int, ...]
    edge_count: int = field(init=False)

    def __post_init__(self):
        if len(self.adjacency) != self.n:
            raise GraphError(f"expected {self.n} adjacency rows, got {len(self.adjacency)}")
        total = 0
        for v, row in enumerate(self.adjacency):
            if row < 0 or row >> self.n or (row >> v) & 1:
                raise GraphError(f"row {v} has a self-loop or out-of-range bit")
            total += row.bit_count()
        if np.any(self.matrix != self.matrix.T):
            raise GraphError("adjacency is not symmetric")
        object.__setattr__(self, "edge_count", total // 2)

    @classmethod
    def from_matrix(cls, A) -> "Graph":
        A = np.asarray(A, dtype=bool)
        n = A.shape[0]
        if A.shape != (n, n) or np.any(np.diag(A)) or np.any(A != A.T):
            raise GraphError("adjacency matrix must be square, symmetric, loop-free")
        rows = tuple(
            int.from_bytes(np.packbits(A[v], bitorder="little").tobytes(), "little") for v in range(n)
        )
        return cls(n, rows)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        rows = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n) or u == v:
                raise GraphError(f"bad edge ({u}, {v}) for n={n}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @property
    def density(self) -> float:
        """|E| / C(n, 2); zero for n < 2."""
        pairs = self.n * (self.n - 1) // 2
        return self.edge_count / pairs if pairs else 0.0

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([row.bit_count() for row in self.adjacency], dtype=np.int64)

    @cached_property
    def matrix(self) -> np.ndarray:
        A = np.zeros((self.n, self.n), dtype=bool)
        for v, row in enumerate(self.adjacency):
            bits = np.frombuffer(row.to_bytes((self.n + 7) // 8, "little"), dtype=np.uint8)
            A[v] = np.unpackbits(bits, bitorder="little")[: self.n].astype(bool)
        A.flags.writeable = False
        return A

    def edges(self) -> list[tuple[int, int]]:
        iu, ju = np.nonzero(np.triu(self.matrix, 1))
        return list(zip(iu.tolist(), ju.tolist()))

    def words(self) -> np.ndarray:
        if self.n > 64:
            raise GraphError("64-bit adjacency words need n <= 64")
        return np.array(self.adjacency, dtype=np.uint64)


# ---------------------------------------------------------------------------
# Generators and file I/O


def er_graph(n: int, p: float, seed) -> Graph:
    """G(n, p): pair (i, j), i < j, in row-major order gets one uniform draw."""
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, 1)
    A = np.zeros((n, n), dtype=bool)
    A[iu] = rng.random(iu[0].size) < p
    return Graph.from_matrix(A | A.T)


def cycle(n: int) -> Graph:
    if n < 3:
        raise GraphError("cycle needs n >= 3")
    return Graph.from_edges(n, [(v, (v + 1) % n) for v in range(n)])


def clique(n: int) -> Graph:
    return Graph.from_matrix(~np.eye(n, dtype=bool))


def disjoint_cliques(sizes: Iterable[int]) -> Graph:
    sizes = list(sizes)
    n = sum(sizes)
    A = np.zeros((n, n), dtype=bool)
    start = 0
    for k in sizes:
        A[start : start + k, start : start + k] = True
        start += k
    np.fill_diagonal(A, False)
    return Graph.from_matrix(A)


def bipartite_complement(n: int) -> Graph:
    """Complement of K_{n/2,n/2}: two disjoint cliques on n/2 vertices."""
    if n % 2:
        raise GraphError("bipartite complement needs even n")
    return disjoint_cliques([n // 2, n // 2])


def read_graph(path: str | Path) -> Graph:
    with open(path) as fh:
        lines = [ln.split() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    try:
        n, m = int(lines[0][0]), int(lines[0][1])
        edges = [(int(a) - 1, int(b) - 1) for a, b in lines[1 : m + 1]]
    except (IndexError, ValueError) as exc:
        raise GraphError(f"malformed graph file {path}: {exc}") from exc
    if len(edges) != m:
        raise GraphError(f"graph file declares {m} edges, found {len(edges)}")
    return Graph.from_edges(n, edges)


def write_graph(G: Graph, path: str | Path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{G.n} {G.edge_count}\n")
        for u, v in G.edges():
            fh.write(f"{u + 1} {v + 1}\n")


# ---------------------------------------------------------------------------
# Cuts and the cut polynomial


def cut_value(G: Graph, S: int) -> int:
    """Number of edges with exactly one endpoint in vertex set S."""
    full = (1 << G.n) - 1
    outside = full & ~S
    total = 0
    for v, row in enumerate(G.adjacency):
        if (S >> v) & 1:
            total += (row & outside).bit_count()
    return total


def _check_p(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise GraphError(f"p={p} outside [0, 1]")


def pair_coefficients(G: Graph, p: float) -> tuple[float, np.ndarray]:
    """Constant term and symmetric matrix of x_i x_j coefficients of g_p.

    Non-edges get p/2, edges p/2 - 1/2, the diagonal 0.
    """
    _check_p(p)
    C = np.where(G.matrix, p / 2.0 - 0.5, p / 2.0)
    np.fill_diagonal(C, 0.0)
    const = G.edge_count / 2.0 - p * G.n * (G.n - 1) / 4.0
    return const, C


def cut_polynomial(G: Graph, p: float) -> FourierExpansion:
    const, C = pair_coefficients(G, p)
    coeffs = np.zeros(1 << G.n)
    coeffs[0] = const
    iu, ju = np.triu_indices(G.n, 1)
    coeffs[(1 << iu) | (1 << ju)] = C[iu, ju]
    return FourierExpansion(G.n, coeffs)


def cut_point(G: Graph, S: int) -> int:
    """Cube index of x_S, where (x_S)_i = +1 exactly when vertex i is in S."""
    return ((1 << G.n) - 1) & ~S


def cut_polynomial_at(G: Graph, p: float, S: int) -> float:
    """g_p(x_S) summed term by term from the pair coefficients."""
    const, C = pair_coefficients(G, p)
    x = np.array([1.0 if (S >> v) & 1 else -1.0 for v in range(G.n)])
    iu, ju = np.triu_indices(G.n, 1)
    return const + fsum(C[iu, ju] * x[iu] * x[ju])


def evaluate_cut_identity(G: Graph, p: float, S: int) -> float:
    """|g_p(x_S) - (E(S, S^c) - p |S| |S^c|)|."""
    s = S.bit_count()
    rhs = cut_value(G, S) - p * s * (G.n - s)
    return abs(cut_polynomial_at(G, p, S) - rhs)


# ---------------------------------------------------------------------------
# Cut deviation search


@dataclass(frozen=True)
class CutSearchResult:
    best_mask: int
    cut_value: int
    expected: float
    deviation: float
    exhaustive: bool
    cuts_examined: int
    p: float
    one_sided: bool = False

    @property
    def vertices(self) -> list[int]:
        """1-based vertex labels of the witness set S."""
        return [v + 1 for v in range(self.best_mask.bit_length()) if (self.best_mask >> v) & 1]


def _result(G: Graph, p: float, mask: int, exhaustive: bool, examined: int, one_sided: bool) -> CutSearchResult:
    s = mask.bit_count()
    cv = cut_value(G, mask)
    expected = p * s * (G.n - s)
    dev = cv - expected
    return CutSearchResult(
        best_mask=mask,
        cut_value=cv,
        expected=expected,
        deviation=dev if one_sided else abs(dev),
        exhaustive=exhaustive,
        cuts_examined=examined,
        p=p,
        one_sided=one_sided,
    )


def _resolve_p(G: Graph, p: float | None) -> float:
    p = G.density if p is None else float(p)
    _check_p(p)
    return p


def exhaustive_cut_deviation(
    G: Graph,
    p: float | None = None,
    *,
    one_sided: bool = False,
    threads: int | None = 1,
    max_n: int = EXHAUSTIVE_MAX_N,
) -> CutSearchResult:
    """Exact D_p(G) (or the one-sided maximum) by Gray-code enumeration.

    S and its complement give the same cut and the same |S||S^c|, so only
    masks without the last vertex are visited.  Those masks are split by a
    fixed high-bit prefix into independent sweeps whose winners are merged in
    prefix order; ties go to the smallest mask, so the answer does not depend
    on the thread count.  ``p`` defaults to the edge density.
    """
    p = _resolve_p(G, p)
    n = G.n
    if n > max_n:
        raise GraphError(f"n={n} exceeds exhaustive cap {max_n}; use heuristic_cut_deviation")
    if n <= 1:
        return _result(G, p, 0, True, 1, one_sided)
    free = n - 1
    split = min(free, max(0, free - 14), 8)
    low = free - split
    prefixes = (np.arange(1 << split, dtype=np.uint64) << np.uint64(low)).astype(np.uint64)
    workers = min(resolve_threads(threads), numba.config.NUMBA_NUM_THREADS)
    previous = numba.get_num_threads()
    numba.set_num_threads(workers)
    try:
        best, masks = _kernels.gray_partitions(G.words(), G.degrees, n, p, one_sided, prefixes, low)
    finally:
        numba.set_num_threads(previous)
    j_best = 0
    for j in range(1, len(best)):
        if best[j] > best[j_best] or (best[j] == best[j_best] and masks[j] < masks[j_best]):
            j_best = j
    return _result(G, p, int(masks[j_best]), True, 1 << free, one_sided)


def naive_cut_deviation(G: Graph, p: float | None = None, *, one_sided: bool = False) -> CutSearchResult:
    """Same search as the exhaustive one, recomputing each cut from all pairs."""
    p = _resolve_p(G, p)
    if G.n > EXHAUSTIVE_MAX_N:
        raise GraphError(f"n={G.n} exceeds exhaustive cap {EXHAUSTIVE_MAX_N}")
    if G.n <= 1:
        return _result(G, p, 0, True, 1, one_sided)
    count = 1 << (G.n - 1)
    _, mask = _kernels.naive_all_pairs(np.ascontiguousarray(G.matrix), G.n, p, one_sided, count)
    return _result(G, p, int(mask), True, count, one_sided)


def _objective(cut, s, n, p, one_sided):
    dev = cut - p * s * (n - s)
    return dev if one_sided else np.abs(dev)


def _climb(G: Graph, p: float, seed, one_sided: bool) -> tuple[float, int]:
    rng = np.random.default_rng(seed)
    n = G.n
    A = G.matrix.astype(np.int64)
    deg = G.degrees
    inS = rng.random(n) < 0.5
    nbr_in = A @ inS.astype(np.int64)
    cut = int(deg[inS].sum() - nbr_in[inS].sum())
    s = int(inS.sum())
    obj = float(_objective(cut, s, n, p, one_sided))
    while True:
        delta = np.where(inS, 2 * nbr_in - deg, deg - 2 * nbr_in)
        s_new = s + np.where(inS, -1, 1)
        cand = _objective(cut + delta, s_new, n, p, one_sided)
        v = int(np.argmax(cand))
        if not cand[v] > obj + 1e-12:
            break
        sign = -1 if inS[v] else 1
        inS[v] = not inS[v]
        nbr_in += sign * A[v]
        cut += int(delta[v])
        s += sign
        obj = float(cand[v])
    mask = sum(1 << v for v in np.flatnonzero(inS).tolist())
    # canonical representative of {S, S^c}
    full = (1 << n) - 1
    return obj, min(mask, full ^ mask)


def heuristic_cut_deviation(
    G: Graph,
    p: float | None = None,
    restarts: int = 32,
    rng: np.random.Generator | int | None = 0,
    *,
    one_sided: bool = False,
    threads: int | None = 1,
) -> CutSearchResult:
    """Best single-flip hill climb over random restarts.

    Any cut found is a witness, so the result is a lower bound on D_p(G).
    Restart seeds are drawn up front from ``rng``, so the result is the same
    for every thread count.
    """
    p = _resolve_p(G, p)
    if restarts < 1:
        raise GraphError("need at least one restart")
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    seeds = gen.integers(0, 2**63 - 1, size=restarts).tolist()
    runs = ordered_map(lambda sd: _climb(G, p, sd, one_sided), seeds, threads)
    best_obj, best_mask = runs[0]
    for obj, mask in runs[1:]:
        if obj > best_obj or (obj == best_obj and mask < best_mask):
            best_obj, best_mask = obj, mask
    return _result(G, p, best_mask, False, restarts, one_sided)


# ---------------------------------------------------------------------------
# Influences of the cut polynomial


@lru_cache(maxsize=4096)
def _binomial_row(k: int) -> np.ndarray:
    """Pr[Bin(k, 1/2) = j], each entry a correctly rounded C(k, j) / 2^k."""
    denom = 1 << k
    c = 1
    row = []
    for j in range(k + 1):
        row.append(c / denom)
        c = c * (k - j) // (j + 1)
    out = np.array(row)
    out.flags.writeable = False
    return out


def abs_linear_expectation(w_a: float, k_a: int, w_b: float, k_b: int) -> float:
    """E|w_a (x_1 + ... + x_{k_a}) + w_b (y_1 + ... + y_{k_b})| for uniform +-1 bits.

    Exact sum over the (k_a + 1) x (k_b + 1) lattice of the two binomial counts.
    """
    if k_a < 0 or k_b < 0:
        raise GraphError("counts must be non-negative")
    pa, pb = _binomial_row(k_a), _binomial_row(k_b)
    a = 2.0 * np.arange(k_a + 1) - k_a
    b = 2.0 * np.arange(k_b + 1) - k_b
    terms = np.abs(w_a * a[:, None] + w_b * b[None, :]) * (pa[:, None] * pb[None, :])
    return fsum(terms)


def cut_polynomial_l1_profile(G: Graph, p: float) -> np.ndarray:
    """Per-vertex L1 influence of g_p without enumerating the cube."""
    _check_p(p)
    cache: dict[int, float] = {}
    out = np.empty(G.n)
    for v, dv in enumerate(G.degrees.tolist()):
        if dv not in cache:
            cache[dv] = abs_linear_expectation(p / 2.0, G.n - 1 - dv, -(1.0 - p) / 2.0, dv)
        out[v] = cache[dv]
    return out


def cut_polynomial_influence(G: Graph, p: float) -> tuple[float, float]:
    """(total L1, total L2) influence of g_p."""
    l1 = fsum(cut_polynomial_l1_profile(G, p))
    _, C = pair_coefficients(G, p)
    # Inf^sq = sum_S |S| g_hat(S)^2 = 2 * sum over pairs of c_ij^2
    return l1, fsum(C**2)


def timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0


def fit_loglog_slope(xs, ys) -> float:
    lx, ly = np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float))
    return float(np.polyfit(lx, ly, 1)[0])


def theorem_52_constant(G: Graph, deviation: float) -> float:
    """deviation / (min(rho, 1 - rho) n^{3/2}); inf when the density is 0 or 1."""
    rho = G.density
    denom = min(rho, 1.0 - rho) * G.n**1.5
    return deviation / denom if denom > 0 else math.inf
