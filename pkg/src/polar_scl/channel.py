"""BPSK over AWGN, channel LLRs and the Q-bit LLR quantizer."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mode import DecoderMode


@dataclass(frozen=True)
class AwgnChannel:
    """Binary-input AWGN channel parameterised by Eb/N0 and code rate."""

    ebn0_db: float
    rate: float = 0.5

    def __post_init__(self) -> None:
        if not 0 < self.rate <= 1:
            raise ValueError("rate must lie in (0, 1]")

    @property
    def sigma2(self) -> float:
        return 1.0 / (2.0 * self.rate * 10.0 ** (self.ebn0_db / 10.0))

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)


def modulate(x) -> np.ndarray:
    return 1.0 - 2.0 * np.asarray(x, dtype=np.float64)


def transmit(x, ch: AwgnChannel, rng: np.random.Generator | int | None = None) -> np.ndarray:
    """``y = (1 - 2x) + noise`` with independent N(0, sigma2) samples."""
    rng = np.random.default_rng(rng)
    s = modulate(x)
    return s + ch.sigma * rng.standard_normal(s.shape)


def channel_llrs(y, ch: AwgnChannel) -> np.ndarray:
    """``ln W(y|0) / W(y|1) = 2y / sigma2``."""
    return 2.0 * np.asarray(y, dtype=np.float64) / ch.sigma2


def quantize(llr, q: int):
    """Uniform step-1 quantizer: round half away from zero, saturate to ±(2^(q-1) - 1)."""
    if q < 2:
        raise ValueError("Q must be at least 2")
    arr = np.asarray(llr, dtype=np.float64)
    if np.isnan(arr).any():
        raise ValueError("cannot quantize NaN")
    limit = (1 << (q - 1)) - 1
    rounded = np.sign(arr) * np.floor(np.abs(arr) + 0.5)
    out = np.clip(rounded, -limit, limit).astype(np.int32)
    return int(out) if out.ndim == 0 else out


def decoder_input(llr, mode: DecoderMode) -> np.ndarray:
    """Channel LLRs in the representation ``mode`` works with (float64 array)."""
    llr = np.asarray(llr, dtype=np.float64)
    if mode.kind == "fixed":
        return quantize(llr * mode.llr_scale, mode.q).astype(np.float64)
    return llr
