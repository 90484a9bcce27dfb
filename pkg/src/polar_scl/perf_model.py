"""Cycle-count and throughput model of the list decoder hardware.

A codeword takes ``2N + (N / P) log2(N / 4P)`` cycles of LLR and partial-sum
processing with ``P`` processing elements per path, plus the metric sorting
cycles: one per information bit with the full sorter, and one more per
frozen cluster with the pruned sorter (the existing metrics are re-sorted
after every run of frozen bits).
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def _is_pow2(x: int) -> bool:
    return x >= 1 and x & (x - 1) == 0


@dataclass(frozen=True)
class LatencyQuery:
    """Parameters for one latency evaluation.

    ``sorter`` is ``"full"``, ``"pruned"`` or ``"none"`` (plain SC).
    ``frequency_hz`` is only needed for :func:`throughput`.
    """

    N: int
    P: int
    info_size: int = 0
    frozen_clusters: int = 0
    sorter: str = "full"
    frequency_hz: float | None = None

    def __post_init__(self) -> None:
        if not _is_pow2(self.N) or not _is_pow2(self.P):
            raise ValueError("N and P must be powers of two")
        if 4 * self.P > self.N:
            raise ValueError("P must not exceed N / 4")
        if self.sorter not in ("full", "pruned", "none"):
            raise ValueError(f"unknown sorter {self.sorter!r}")
        if not 0 <= self.info_size <= self.N:
            raise ValueError("information set size out of range")
        if self.frozen_clusters < 0:
            raise ValueError("frozen cluster count must be nonnegative")


def sorting_latency(q: LatencyQuery) -> int:
    if q.sorter == "none":
        return 0
    if q.sorter == "full":
        return q.info_size
    return q.info_size + q.frozen_clusters


def decode_latency(q: LatencyQuery) -> int:
    """Cycles per codeword."""
    stages = int(math.log2(q.N // (4 * q.P)))
    return 2 * q.N + (q.N // q.P) * stages + sorting_latency(q)


def throughput(q: LatencyQuery) -> float:
    """Coded bits per second, ``f N / D``."""
    if q.frequency_hz is None:
        raise ValueError("throughput needs a clock frequency")
    if q.frequency_hz <= 0:
        raise ValueError("frequency must be positive")
    return q.frequency_hz * q.N / decode_latency(q)


@dataclass(frozen=True)
class LatencyRow:
    label: str
    query: LatencyQuery

    @property
    def cycles(self) -> int:
        return decode_latency(self.query)

    @property
    def throughput_mbps(self) -> float | None:
        return None if self.query.frequency_hz is None else throughput(self.query) / 1e6


# Published configurations (list size, CRC, clock) and their cycle counts.
REFERENCE_ROWS = (
    LatencyRow("SCL L=2 |A|=512 full", LatencyQuery(1024, 64, 512, 57, "full", 847e6)),
    LatencyRow("SCL L=4 |A|=512 pruned", LatencyQuery(1024, 64, 512, 57, "pruned", 794e6)),
    LatencyRow("SCL L=8 |A|=512 pruned", LatencyQuery(1024, 64, 512, 57, "pruned", 637e6)),
    LatencyRow("CA-SCL L=2 crc4 |A|=516 full", LatencyQuery(1024, 64, 516, 55, "full", 847e6)),
    LatencyRow("CA-SCL L=4 crc8 |A|=520 pruned", LatencyQuery(1024, 64, 520, 54, "pruned", 794e6)),
    LatencyRow("CA-SCL L=8 crc16 |A|=528 pruned", LatencyQuery(1024, 64, 528, 52, "pruned", 637e6)),
    LatencyRow("SC N=2048", LatencyQuery(2048, 64, sorter="none")),
    LatencyRow("SC N=4096", LatencyQuery(4096, 64, sorter="none")),
)
REFERENCE_CYCLES = (2592, 2649, 2649, 2596, 2654, 2660, 4192, 8448)


def format_table(rows) -> str:
    """Plain-text table: label, cycles, throughput."""
    rows = list(rows)
    width = max([len(r.label) for r in rows] + [13])
    lines = [f"{'configuration':<{width}}  {'D_MS':>5}  {'cycles':>7}  {'Mbps':>8}"]
    for r in rows:
        t = r.throughput_mbps
        t_text = "-" if t is None else f"{t:.1f}"
        lines.append(f"{r.label:<{width}}  {sorting_latency(r.query):>5d}  {r.cycles:>7d}  {t_text:>8}")
    return "\n".join(lines)
