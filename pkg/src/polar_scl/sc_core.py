"""LLR update rules and the stage-by-stage SC recursion.

Stage ``s`` of the butterfly holds ``N`` LLRs ``L_s^(k)``; stage 0 carries the
channel LLRs and stage ``n`` the decision LLRs.  Node ``j`` of stage ``s``
(``j < 2**s``) occupies positions ``j, j + 2**s, j + 2 * 2**s, ...``, and the
entries for bit ``i`` live in node ``i >> (n - s)``.  ``ScState`` keeps the
full ``(n + 1) x N`` memories in this layout; it is the readable reference
model that the compiled list decoder is checked against.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .mode import EXACT, EXACT_MODE, FIXED, DecoderMode


@njit(cache=True)
def _sign(x):
    if x > 0:
        return 1.0
    if x < 0:
        return -1.0
    return 0.0


@njit(cache=True)
def softplus(x):
    """``ln(1 + e^x)`` without overflow."""
    if x > 0:
        return x + math.log1p(math.exp(-x))
    return math.log1p(math.exp(x))


@njit(cache=True)
def f_minus_exact(a, b):
    """``ln((e^(a+b) + 1) / (e^a + e^b))`` without overflow.

    Small inputs go through ``2 atanh(tanh(a/2) tanh(b/2))``; the max-log form
    with correction terms cancels badly there but is safe for large inputs.
    """
    aa = abs(a)
    ab = abs(b)
    if min(aa, ab) < 2.0:
        return 2.0 * math.atanh(math.tanh(0.5 * a) * math.tanh(0.5 * b))
    mag = min(aa, ab) + math.log1p(math.exp(-(aa + ab))) - math.log1p(math.exp(-abs(aa - ab)))
    return _sign(a) * _sign(b) * mag


@njit(cache=True)
def f_minus_minsum(a, b):
    return _sign(a) * _sign(b) * min(abs(a), abs(b))


@njit(cache=True)
def f_minus(a, b, mode):
    if mode == EXACT:
        return f_minus_exact(a, b)
    return f_minus_minsum(a, b)


@njit(cache=True)
def f_plus(a, b, u, limit=np.inf):
    """``(-1)^u a + b``, clipped to ``±limit``."""
    v = b - a if u else b + a
    if v > limit:
        return limit
    if v < -limit:
        return -limit
    return v


@njit(cache=True)
def _first_stage(i, n):
    """Lowest stage whose node changes when moving on to bit ``i``."""
    if i == 0:
        return 1
    tz = 0
    while (i >> tz) & 1 == 0:
        tz += 1
    return n - tz


@njit(cache=True)
def compute_decision_llr(llr, ps, i, n, mode, limit):
    N = 1 << n
    for s in range(_first_stage(i, n), n + 1):
        j = i >> (n - s)
        half = 1 << (s - 1)
        for k in range(j, N, 1 << s):
            m = k >> 1
            a = 2 * m - (m & (half - 1))
            b = a + half
            if k & 1:
                llr[s, k] = f_plus(llr[s - 1, a], llr[s - 1, b], ps[s, k - 1], limit)
            else:
                llr[s, k] = f_minus(llr[s - 1, a], llr[s - 1, b], mode)
    return llr[n, i]


@njit(cache=True)
def propagate_partial_sums(ps, i, u, n):
    N = 1 << n
    ps[n, i] = u
    s = n
    j = i
    while s >= 1 and j & 1:
        half = 1 << (s - 1)
        for k in range(j, N, 1 << s):
            m = k >> 1
            a = 2 * m - (m & (half - 1))
            ps[s - 1, a] = ps[s, k - 1] ^ ps[s, k]
            ps[s - 1, a + half] = ps[s, k]
        s -= 1
        j >>= 1


class ScState:
    """LLR stage memory and partial sums of one SC decoding thread.

    Bits must be visited in order: ``decision_llr(i)`` then
    ``update_partial_sums(i, u)`` for ``i = 0, 1, ..., N - 1``.
    """

    def __init__(self, channel_llrs, mode: DecoderMode = EXACT_MODE):
        llr0 = np.asarray(channel_llrs, dtype=np.float64)
        N = llr0.shape[0]
        n = N.bit_length() - 1
        if n < 1 or (1 << n) != N:
            raise ValueError(f"length {N} is not a power of two >= 2")
        self.n = n
        self.N = N
        self.mode = mode
        self.llr = np.zeros((n + 1, N))
        self.llr[0] = llr0
        self.ps = np.zeros((n + 1, N), dtype=np.uint8)
        self.index = 0
        self._pending = False

    def copy(self) -> "ScState":
        other = ScState.__new__(ScState)
        other.__dict__.update(self.__dict__)
        other.llr = self.llr.copy()
        other.ps = self.ps.copy()
        return other

    def decision_llr(self, i: int) -> float:
        if i != self.index or self._pending:
            raise ValueError(f"bit {i} requested out of order (next is {self.index})")
        limit = self.mode.llr_limit if self.mode.code == FIXED else np.inf
        self._pending = True
        return float(compute_decision_llr(self.llr, self.ps, i, self.n, self.mode.code, limit))

    def update_partial_sums(self, i: int, u: int) -> None:
        if i != self.index or not self._pending:
            raise ValueError(f"bit {i} decided out of order (next is {self.index})")
        propagate_partial_sums(self.ps, i, int(u), self.n)
        self._pending = False
        self.index += 1

    @property
    def codeword_estimate(self) -> np.ndarray:
        """Stage-0 partial sums; the re-encoded decisions once all bits are in."""
        return self.ps[0].copy()
