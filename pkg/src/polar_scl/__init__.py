"""Polar codes with successive cancellation and LLR-based list decoding."""

from __future__ import annotations

from .channel import AwgnChannel, channel_llrs, quantize, transmit
from .codebook import (
    PolarCode,
    construct_monte_carlo,
    extend_with_crc,
    frozen_cluster_count,
    read_frozen_file,
    write_frozen_file,
)
from .crc import CRC4, CRC8, CRC16, CrcScheme, append_crc, crc_check, crc_remainder, get_scheme
from .encoder import bit_reverse_permutation, encode, polar_transform
from .mode import DecoderMode
from .perf_model import LatencyQuery, decode_latency, sorting_latency, throughput
from .sc_decoder import sc_decode
from .scl_decoder import SclResult, scl_decode, scl_decode_batch, scl_decode_reference, select_output
from .simulate import FerRecord, SimConfig, compare_configs, run_sweep
from .sorter import full_radix_sort, pruned_radix_sort, sort_existing_metrics

__all__ = [
    "AwgnChannel",
    "CRC4",
    "CRC8",
    "CRC16",
    "CrcScheme",
    "DecoderMode",
    "FerRecord",
    "LatencyQuery",
    "PolarCode",
    "SclResult",
    "SimConfig",
    "append_crc",
    "bit_reverse_permutation",
    "channel_llrs",
    "compare_configs",
    "construct_monte_carlo",
    "crc_check",
    "crc_remainder",
    "decode_latency",
    "encode",
    "extend_with_crc",
    "frozen_cluster_count",
    "full_radix_sort",
    "get_scheme",
    "polar_transform",
    "pruned_radix_sort",
    "quantize",
    "read_frozen_file",
    "run_sweep",
    "sc_decode",
    "scl_decode",
    "scl_decode_batch",
    "scl_decode_reference",
    "select_output",
    "sort_existing_metrics",
    "sorting_latency",
    "throughput",
    "transmit",
    "write_frozen_file",
]
