"""Plain successive cancellation decoding."""

from __future__ import annotations

import numpy as np
from numba import njit

from .channel import decoder_input
from .codebook import PolarCode
from .mode import EXACT_MODE, DecoderMode
from .sc_core import compute_decision_llr, propagate_partial_sums


@njit(cache=True)
def _sc_batch(ch, info_mask, u_frozen, n, mode, limit, out):
    B, N = ch.shape
    llr = np.zeros((n + 1, N))
    ps = np.zeros((n + 1, N), dtype=np.uint8)
    for b in range(B):
        for k in range(N):
            llr[0, k] = ch[b, k]
        for i in range(N):
            lam = compute_decision_llr(llr, ps, i, n, mode, limit)
            if info_mask[i]:
                u = 0 if lam >= 0.0 else 1
            else:
                u = u_frozen[i]
            out[b, i] = u
            propagate_partial_sums(ps, i, u, n)


def sc_decode_full(code: PolarCode, channel_llrs, mode: DecoderMode = EXACT_MODE) -> np.ndarray:
    """All ``N`` decisions ``u_hat`` (one row per input row)."""
    ch = decoder_input(channel_llrs, mode)
    single = ch.ndim == 1
    ch = np.ascontiguousarray(np.atleast_2d(ch))
    if ch.shape[1] != code.N:
        raise ValueError(f"expected {code.N} channel LLRs, got {ch.shape[1]}")
    out = np.empty(ch.shape, dtype=np.uint8)
    limit = mode.llr_limit if mode.kind == "fixed" else np.inf
    _sc_batch(ch, code.info_mask, code.u_frozen, code.n, mode.code, limit, out)
    return out[0] if single else out


def sc_decode(code: PolarCode, channel_llrs, mode: DecoderMode = EXACT_MODE) -> np.ndarray:
    """SC estimate of the payload (``code.k_info`` bits; CRC bits are dropped).

    Decision LLR 0 decodes to 0.  ``channel_llrs`` may be a single vector or
    a batch of rows.
    """
    u = sc_decode_full(code, channel_llrs, mode)
    return u[..., code.info_indices[: code.k_info]]
