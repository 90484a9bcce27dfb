"""Bit-serial CRC for CRC-aided list decoding.

Convention: MSB-first polynomial division, zero initial register, no
reflection, no final XOR.  The register state after feeding a message
equals ``message(x) * x**r mod g(x)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit


@dataclass(frozen=True)
class CrcScheme:
    """A CRC generator polynomial of degree ``r``.

    ``generator`` holds the full polynomial as an integer bit mask, including
    the ``x**r`` term (bit ``r``) and the constant term (bit 0).
    """

    name: str
    r: int
    generator: int

    def __post_init__(self) -> None:
        if self.r < 1:
            raise ValueError("CRC length must be positive")
        if self.generator >> self.r != 1:
            raise ValueError(f"generator {self.generator:#x} is not of degree {self.r}")
        if not self.generator & 1:
            raise ValueError("generator must have a nonzero constant term")

    @property
    def taps(self) -> int:
        """Generator without its leading term; what the register XORs in."""
        return self.generator & ((1 << self.r) - 1)


CRC4 = CrcScheme("crc4", 4, (1 << 4) | (1 << 1) | 1)
CRC8 = CrcScheme("crc8", 8, (1 << 8) | (1 << 7) | (1 << 6) | (1 << 4) | (1 << 2) | 1)
CRC16 = CrcScheme("crc16", 16, (1 << 16) | (1 << 15) | (1 << 2) | 1)

SCHEMES = {s.name: s for s in (CRC4, CRC8, CRC16)}


def get_scheme(name: str | None) -> CrcScheme | None:
    """Look up a scheme by name; ``None``/``"none"`` means no CRC."""
    if name is None or name.lower() in ("", "none"):
        return None
    try:
        return SCHEMES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown CRC {name!r}; choose from {sorted(SCHEMES)}") from None


@njit(cache=True)
def crc_step(state, bit, r, taps):
    """Shift one message bit into an ``r``-bit register."""
    feedback = ((state >> (r - 1)) & 1) ^ (bit & 1)
    state = (state << 1) & ((1 << r) - 1)
    if feedback:
        state ^= taps
    return state


@dataclass(frozen=True)
class CrcRegister:
    scheme: CrcScheme
    state: int = 0

    def update(self, bit: int) -> "CrcRegister":
        return CrcRegister(self.scheme, crc_step(self.state, int(bit), self.scheme.r, self.scheme.taps))

    def bits(self) -> np.ndarray:
        return int_to_bits(self.state, self.scheme.r)


def crc_update(reg: CrcRegister, bit: int) -> CrcRegister:
    return reg.update(bit)


def int_to_bits(value: int, width: int) -> np.ndarray:
    """MSB-first bit vector of ``value``."""
    return np.array([(value >> (width - 1 - k)) & 1 for k in range(width)], dtype=np.uint8)


@njit(cache=True)
def _remainder(message, r, taps):
    state = 0
    for b in message:
        state = crc_step(state, b, r, taps)
    return state


def crc_remainder(message, scheme: CrcScheme) -> np.ndarray:
    """The ``r`` check bits of ``message`` (MSB first)."""
    msg = np.ascontiguousarray(message, dtype=np.uint8)
    return int_to_bits(_remainder(msg, scheme.r, scheme.taps), scheme.r)


def append_crc(message, scheme: CrcScheme | None) -> np.ndarray:
    """``message`` followed by its check bits; rows of a 2-D batch are handled independently."""
    msg = np.asarray(message, dtype=np.uint8)
    if scheme is None:
        return msg.copy()
    if msg.ndim == 2:
        checks = np.array([crc_remainder(row, scheme) for row in msg], dtype=np.uint8).reshape(len(msg), scheme.r)
        return np.concatenate([msg, checks], axis=1)
    return np.concatenate([msg, crc_remainder(msg, scheme)])


def crc_check(codeword_bits, scheme: CrcScheme) -> bool:
    """True when message plus appended check bits divide evenly."""
    bits = np.ascontiguousarray(codeword_bits, dtype=np.uint8)
    return _remainder(bits, scheme.r, scheme.taps) == 0
