"""Compiled cut-enumeration kernels (numba)."""

from __future__ import annotations

import warnings

import numba as nb
import numpy as np

# numba probes an outdated system TBB before falling back to another layer
warnings.filterwarnings("ignore", message="The TBB threading layer", category=nb.NumbaWarning)


@nb.njit(inline="always")
def _popcount(v):
    v = v - ((v >> np.uint64(1)) & np.uint64(0x5555555555555555))
    v = (v & np.uint64(0x3333333333333333)) + ((v >> np.uint64(2)) & np.uint64(0x3333333333333333))
    v = (v + (v >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return np.int64((v * np.uint64(0x0101010101010101)) >> np.uint64(56))


@nb.njit(inline="always")
def _ctz(k):
    c = 0
    while (k & 1) == 0:
        k >>= 1
        c += 1
    return c


@nb.njit(inline="always")
def _direct_cut(adj, n, mask):
    cut = 0
    for v in range(n):
        if (mask >> np.uint64(v)) & np.uint64(1):
            cut += _popcount(adj[v] & ~mask)
    return cut


@nb.njit(inline="always")
def _better(val, mask, best, best_mask):
    return val > best or (val == best and mask < best_mask)


@nb.njit(cache=True)
def gray_sweep(adj, deg, n, p, one_sided, prefix, low_bits):
    """Best cut among masks ``prefix | g`` for g over all low_bits-bit values.

    Walks the low bits in Gray-code order; each step flips one vertex and
    updates the cut value from that vertex's neighbourhood in O(1) word ops.
    Returns (best objective, best mask, masks visited).
    """
    mask = np.uint64(prefix)
    cut = _direct_cut(adj, n, mask)
    s = _popcount(mask)
    dev = cut - p * s * (n - s)
    best = dev if one_sided else abs(dev)
    best_mask = mask
    total = np.int64(1) << np.int64(low_bits)
    for k in range(1, total):
        v = _ctz(k)
        bit = np.uint64(1) << np.uint64(v)
        inside = _popcount(adj[v] & mask)
        if mask & bit:
            cut += 2 * inside - deg[v]
            s -= 1
        else:
            cut += deg[v] - 2 * inside
            s += 1
        mask ^= bit
        dev = cut - p * s * (n - s)
        val = dev if one_sided else abs(dev)
        if _better(val, mask, best, best_mask):
            best = val
            best_mask = mask
    return best, best_mask, total


@nb.njit(parallel=True, cache=True)
def gray_partitions(adj, deg, n, p, one_sided, prefixes, low_bits):
    m = prefixes.shape[0]
    best = np.empty(m, dtype=np.float64)
    masks = np.empty(m, dtype=np.uint64)
    for j in nb.prange(m):
        b, bm, _ = gray_sweep(adj, deg, n, p, one_sided, prefixes[j], low_bits)
        best[j] = b
        masks[j] = bm
    return best, masks


@nb.njit(cache=True)
def naive_all_pairs(adjm, n, p, one_sided, count):
    """Reference search recomputing every cut from all vertex pairs.

    O(count * n^2); only a baseline for timing the Gray-code kernel.
    """
    best = -np.inf
    best_mask = np.uint64(0)
    for m in range(count):
        cut = 0
        s = 0
        for u in range(n):
            bu = (m >> u) & 1
            s += bu
            for v in range(u + 1, n):
                if adjm[u, v] and bu != ((m >> v) & 1):
                    cut += 1
        dev = cut - p * s * (n - s)
        val = dev if one_sided else abs(dev)
        if _better(val, np.uint64(m), best, best_mask):
            best = val
            best_mask = np.uint64(m)
    return best, best_mask
