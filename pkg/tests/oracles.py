"""Independent reference computations used by the tests.

Everything here is written from the definitions (dense matrices, exhaustive
enumeration, long division) and shares no code with the package.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def kernel_power(n: int) -> np.ndarray:
    """``F^{(x)n}`` with ``F = [[1, 0], [1, 1]]``."""
    F = np.array([[1, 0], [1, 1]], dtype=np.int64)
    G = np.ones((1, 1), dtype=np.int64)
    for _ in range(n):
        G = np.kron(G, F)
    return G


def bit_reversal_matrix(n: int) -> np.ndarray:
    N = 1 << n
    B = np.zeros((N, N), dtype=np.int64)
    for i in range(N):
        rev = int(format(i, f"0{n}b")[::-1], 2) if n else 0
        B[i, rev] = 1
    return B


def generator_matrix(n: int) -> np.ndarray:
    """``G_N = B_N F^{(x)n}``; codewords are ``x = u G_N`` over GF(2)."""
    return (bit_reversal_matrix(n) @ kernel_power(n)) % 2


def encode_dense(u) -> np.ndarray:
    u = np.asarray(u, dtype=np.int64)
    n = u.shape[-1].bit_length() - 1
    return ((u @ generator_matrix(n)) % 2).astype(np.uint8)


def all_inputs(N: int) -> np.ndarray:
    return np.array(list(itertools.product((0, 1), repeat=N)), dtype=np.uint8)


def symbol_log_posteriors(llr) -> np.ndarray:
    """``ln P(x_k = b | y_k)`` for b in {0, 1}, shape (N, 2), uniform prior."""
    llr = np.asarray(llr, dtype=np.float64)
    lp0 = -np.logaddexp(0.0, -llr)
    lp1 = -np.logaddexp(0.0, llr)
    return np.stack([lp0, lp1], axis=1)


def prefix_neg_log_posterior(llr, prefix) -> float:
    """``-ln Pr[U_0^{i} = prefix | y]`` with all ``N`` inputs uniform.

    Enumerates all ``2**N`` inputs.  The joint posterior sums to one, so when
    the prefix is likely the complement mass is used for full precision.
    """
    llr = np.asarray(llr, dtype=np.float64)
    N = llr.size
    lp = symbol_log_posteriors(llr)
    u = all_inputs(N)
    terms = lp[np.arange(N), encode_dense(u)].sum(axis=1)
    k = len(prefix)
    match = np.all(u[:, :k] == np.asarray(prefix, dtype=np.uint8), axis=1)
    lse_match = np.logaddexp.reduce(terms[match])
    if k == 0 or match.all():
        return 0.0
    lse_rest = np.logaddexp.reduce(terms[~match])
    if lse_match > lse_rest:
        return float(-np.log1p(-np.exp(lse_rest)))
    return float(-lse_match)


def synthetic_likelihood(llr, prefix, u) -> float:
    """``ln W^{(i)}(y, prefix | u)`` up to a constant common to all (prefix, u)."""
    return -prefix_neg_log_posterior(llr, list(prefix) + [u])


def ml_decode(info_set, N: int, llr) -> tuple[np.ndarray, bool]:
    """Exhaustive ML over all codewords with zero frozen bits.

    Returns the information bits of the best codeword and whether it is the
    unique maximiser.
    """
    K = len(info_set)
    infos = all_inputs(K)
    u = np.zeros((len(infos), N), dtype=np.uint8)
    u[:, list(info_set)] = infos
    x = encode_dense(u)
    score = ((1.0 - 2.0 * x) * np.asarray(llr)).sum(axis=1)
    best = int(np.argmax(score))
    ties = np.sum(np.isclose(score, score[best], rtol=0, atol=1e-9))
    return infos[best], bool(ties == 1)


def poly_mod(dividend: int, divisor: int) -> int:
    """Remainder of GF(2) polynomial division on integer bitmasks."""
    dlen = divisor.bit_length()
    while dividend.bit_length() >= dlen:
        dividend ^= divisor << (dividend.bit_length() - dlen)
    return dividend


def bits_to_int(bits) -> int:
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    return value


def crc_by_division(message, generator: int, r: int) -> list[int]:
    """Check bits of ``message`` (MSB first): ``message(x) x^r mod g(x)``."""
    rem = poly_mod(bits_to_int(message) << r, generator)
    return [(rem >> (r - 1 - i)) & 1 for i in range(r)]


def run_starts(mask) -> int:
    """Number of maximal runs of True in a boolean sequence."""
    count = 0
    prev = False
    for m in mask:
        if m and not prev:
            count += 1
        prev = bool(m)
    return count


def stable_top(m, L: int) -> np.ndarray:
    return np.argsort(np.asarray(m), kind="stable")[:L]


def log2(x: int) -> int:
    return int(math.log2(x))
