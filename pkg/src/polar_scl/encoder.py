"""Polar encoding ``x = F^{(x)n} B_n u`` over GF(2), with ``F = [[1, 1], [0, 1]]``."""

from __future__ import annotations

import numpy as np
from numba import njit

from .codebook import PolarCode


def _log2_exact(size: int) -> int:
    n = size.bit_length() - 1
    if size < 1 or (1 << n) != size:
        raise ValueError(f"length {size} is not a power of two")
    return n


@njit(cache=True)
def bit_reversal_indices(n):
    N = 1 << n
    out = np.zeros(N, dtype=np.int64)
    for i in range(N):
        r = 0
        v = i
        for _ in range(n):
            r = (r << 1) | (v & 1)
            v >>= 1
        out[i] = r
    return out


def bit_reverse_permutation(n: int, v) -> np.ndarray:
    """``out[i] = v[rev_n(i)]``; an involution."""
    v = np.asarray(v)
    if v.shape[-1] != 1 << n:
        raise ValueError(f"expected length {1 << n}, got {v.shape[-1]}")
    return v[..., bit_reversal_indices(n)]


@njit(cache=True)
def _transform_rows(u, perm):
    out = np.empty_like(u)
    B, N = u.shape
    for b in range(B):
        row = out[b]
        for i in range(N):
            row[i] = u[b, perm[i]]
        d = 1
        while d < N:
            for start in range(0, N, 2 * d):
                for j in range(start, start + d):
                    row[j] ^= row[j + d]
            d *= 2
    return out


def polar_transform(u) -> np.ndarray:
    """Apply ``G_n`` to a full length-``N`` vector (or each row of a 2-D array).

    ``G_n`` is its own inverse over GF(2), so this also un-encodes.
    """
    u = np.asarray(u, dtype=np.uint8)
    n = _log2_exact(u.shape[-1])
    flat = np.ascontiguousarray(u.reshape(-1, u.shape[-1]))
    return _transform_rows(flat, bit_reversal_indices(n)).reshape(u.shape)


def assemble(code: PolarCode, info_bits) -> np.ndarray:
    """Place ``info_bits`` on A and the frozen values on F."""
    info_bits = np.asarray(info_bits, dtype=np.uint8)
    if info_bits.shape[-1] != code.K:
        raise ValueError(f"expected {code.K} information bits, got {info_bits.shape[-1]}")
    u = np.empty(info_bits.shape[:-1] + (code.N,), dtype=np.uint8)
    u[..., code.frozen_indices] = code.frozen_array
    u[..., code.info_indices] = info_bits
    return u


def encode(code: PolarCode, info_bits) -> np.ndarray:
    """Encode ``K`` information bits (or a batch of rows) into codewords."""
    return polar_transform(assemble(code, info_bits))

