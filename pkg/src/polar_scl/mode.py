"""Arithmetic modes shared by the decoders."""

from __future__ import annotations

from dataclasses import dataclass

# integer codes handed to the compiled kernels
EXACT = 0
MINSUM = 1
FIXED = 2

_KIND_CODES = {"exact": EXACT, "minsum": MINSUM, "fixed": FIXED}


@dataclass(frozen=True)
class DecoderMode:
    """How LLRs and path metrics are represented.

    * ``exact``: floating point, exact f- and exact metric update.
    * ``minsum``: floating point, min-sum f- and the approximate metric update.
    * ``fixed``: ``q``-bit saturating LLRs (step 1) and ``m``-bit unsigned
      saturating path metrics, min-sum arithmetic throughout.

    ``llr_scale`` multiplies channel LLRs before quantization (fixed mode only).
    """

    kind: str = "exact"
    q: int = 6
    m: int = 8
    llr_scale: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in _KIND_CODES:
            raise ValueError(f"unknown mode {self.kind!r}")
        if self.kind == "fixed":
            if self.q < 2:
                raise ValueError("Q must be at least 2")
            if not 1 <= self.m <= 52:
                raise ValueError("M must lie in [1, 52]")
        if self.llr_scale <= 0:
            raise ValueError("llr_scale must be positive")

    @property
    def code(self) -> int:
        return _KIND_CODES[self.kind]

    @property
    def llr_limit(self) -> float:
        """Largest LLR magnitude (inf outside fixed mode)."""
        return float((1 << (self.q - 1)) - 1) if self.kind == "fixed" else float("inf")

    @property
    def metric_limit(self) -> float:
        return float((1 << self.m) - 1) if self.kind == "fixed" else float("inf")

    @classmethod
    def parse(cls, text: str) -> "DecoderMode":
        """Parse ``exact``, ``minsum`` (alias ``minsum-float``) or ``fixed:Q=6,M=8``."""
        kind, _, params = text.strip().partition(":")
        kind = kind.lower()
        if kind in ("minsum-float", "min-sum"):
            kind = "minsum"
        kwargs: dict = {}
        for item in filter(None, (p.strip() for p in params.split(","))):
            key, sep, value = item.partition("=")
            if not sep:
                raise ValueError(f"bad mode parameter {item!r}")
            key = key.strip().lower()
            if key in ("q", "m"):
                kwargs[key] = int(value)
            elif key in ("scale", "llr_scale"):
                kwargs["llr_scale"] = float(value)
            else:
                raise ValueError(f"unknown mode parameter {key!r}")
        return cls(kind, **kwargs)

    def __str__(self) -> str:
        if self.kind == "fixed":
            text = f"fixed:Q={self.q},M={self.m}"
            return text + (f",scale={self.llr_scale:g}" if self.llr_scale != 1.0 else "")
        return self.kind


EXACT_MODE = DecoderMode("exact")
MINSUM_MODE = DecoderMode("minsum")
