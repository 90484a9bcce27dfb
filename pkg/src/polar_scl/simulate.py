"""Monte-Carlo frame/bit error rate simulation.

Every batch of trials draws its information bits and noise from its own
generator ``default_rng([seed, snr_index, batch_index])``.  Batches are
consumed in index order and the stop rule is checked after each one, so the
counted errors depend only on the configuration, never on how many worker
processes produced the batches.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from statistics import NormalDist

import numpy as np

from .channel import AwgnChannel, channel_llrs, transmit
from .codebook import (
    DEFAULT_CONSTRUCTION_TRIALS,
    DEFAULT_DESIGN_EBN0_DB,
    PolarCode,
    extend_with_crc,
    read_frozen_file,
)
from .crc import append_crc, get_scheme
from .encoder import encode
from .mode import DecoderMode
from .sc_decoder import sc_decode
from .scl_decoder import SORTERS, scl_decode_batch

DECODERS = ("sc", "scl", "ca-scl")
FORMATS = ("csv", "jsonl")


def parse_snr_grid(text: str) -> tuple[float, ...]:
    """``"1.5:4.0:0.25"`` (inclusive range), ``"2.0,2.5"`` or a single value."""
    text = text.strip()
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3:
            raise ValueError("SNR range must be start:stop:step")
        start, stop, step = parts
        if step <= 0:
            raise ValueError("SNR step must be positive")
        if stop < start:
            raise ValueError("SNR stop is below start")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(round(start + i * step, 10) for i in range(count))
    return tuple(float(p) for p in text.split(",") if p.strip())


@dataclass(frozen=True)
class SimConfig:
    """One decoder/code/channel setup swept over ``snr`` (Eb/N0 in dB).

    ``k`` is the number of payload bits; with a CRC the code has ``k + r``
    unfrozen positions and the channel rate stays ``k / N``.
    """

    n: int = 10
    k: int = 512
    decoder: str = "scl"
    list_size: int = 8
    mode: str = "exact"
    crc: str | None = None
    sorter: str = "full"
    snr: tuple[float, ...] = (2.0,)
    seed: int = 0
    min_errors: int = 500
    max_trials: int = 1_000_000
    batch_size: int = 500
    design_ebn0_db: float = DEFAULT_DESIGN_EBN0_DB
    construction_trials: int = DEFAULT_CONSTRUCTION_TRIALS
    construction_seed: int = 0
    frozen_file: str | None = None
    workers: int = 1
    label: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "snr", tuple(float(s) for s in self.snr))
        if self.decoder not in DECODERS:
            raise ValueError(f"decoder must be one of {DECODERS}")
        if self.decoder == "ca-scl" and self.crc is None:
            raise ValueError("ca-scl needs a CRC")
        if self.decoder != "ca-scl" and self.crc is not None:
            raise ValueError(f"a CRC is only used by ca-scl, not {self.decoder}")
        get_scheme(self.crc)
        DecoderMode.parse(self.mode)
        if self.sorter not in SORTERS:
            raise ValueError(f"sorter must be one of {SORTERS}")
        if self.list_size < 1:
            raise ValueError("list size must be at least 1")
        if self.min_errors < 1 or self.max_trials < 1 or self.batch_size < 1:
            raise ValueError("stop rule and batch size must be positive")
        if not self.snr:
            raise ValueError("empty SNR grid")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if self.n < 1 or not 0 < self.k <= (1 << self.n):
            raise ValueError("invalid code dimensions")

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        N = 1 << self.n
        text = f"{self.decoder}({N},{self.k})"
        if self.decoder != "sc":
            text += f" L={self.list_size}"
        if self.crc:
            text += f" {self.crc}"
        text += f" {self.mode}"
        if self.sorter != "full":
            text += f" {self.sorter}"
        return text

    @classmethod
    def from_dict(cls, data: dict) -> "SimConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        data = dict(data)
        if isinstance(data.get("snr"), str):
            data["snr"] = parse_snr_grid(data["snr"])
        elif isinstance(data.get("snr"), (int, float)):
            data["snr"] = (float(data["snr"]),)
        return cls(**data)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["snr"] = list(self.snr)
        return d


def wilson_interval(errors: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        return 0.0, 1.0
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    p = errors / trials
    z2n = z * z / trials
    denom = 1 + z2n
    center = (p + z2n / 2) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z2n / (4 * trials)) / denom
    return max(0.0, min(p, center - half)), min(1.0, max(p, center + half))


@dataclass(frozen=True)
class FerRecord:
    ebn0_db: float
    trials: int
    block_errors: int
    fer: float
    ci95_low: float
    ci95_high: float
    bit_errors: int = 0
    ber: float = 0.0
    crc_fallbacks: int = 0
    wall_time_s: float = 0.0

    @classmethod
    def from_counts(cls, ebn0_db, trials, block_errors, bit_errors, k, crc_fallbacks=0, wall_time_s=0.0):
        low, high = wilson_interval(block_errors, trials)
        ber = bit_errors / (trials * k) if trials and k else 0.0
        fer = block_errors / trials if trials else 0.0
        return cls(float(ebn0_db), int(trials), int(block_errors), fer, low, high,
                   int(bit_errors), ber, int(crc_fallbacks), float(wall_time_s))  # fmt: skip

    def overlaps(self, other: "FerRecord") -> bool:
        return self.ci95_low <= other.ci95_high and other.ci95_low <= self.ci95_high


def build_code(cfg: SimConfig) -> PolarCode:
    scheme = get_scheme(cfg.crc)
    r = scheme.r if scheme else 0
    if cfg.frozen_file:
        code = read_frozen_file(cfg.frozen_file)
        if code.n != cfg.n:
            raise ValueError(f"frozen file has N={code.N}, config asks for N={1 << cfg.n}")
        if code.K != cfg.k + r:
            raise ValueError(f"frozen file has |A|={code.K}, expected {cfg.k + r}")
        return dataclasses.replace(code, crc=scheme)
    return extend_with_crc(
        cfg.n, cfg.k, scheme, cfg.design_ebn0_db, cfg.construction_trials, cfg.construction_seed
    )


@dataclass
class _Counts:
    trials: int = 0
    block_errors: int = 0
    bit_errors: int = 0
    crc_fallbacks: int = 0


def _run_batch(cfg: SimConfig, code: PolarCode, snr_index: int, batch_index: int, size: int) -> _Counts:
    rng = np.random.default_rng([cfg.seed, snr_index, batch_index])
    ch = AwgnChannel(cfg.snr[snr_index], cfg.k / code.N)
    payload = rng.integers(0, 2, (size, cfg.k), dtype=np.uint8)
    x = encode(code, append_crc(payload, code.crc))
    llr = channel_llrs(transmit(x, ch, rng), ch)
    mode = DecoderMode.parse(cfg.mode)
    fallbacks = 0
    if cfg.decoder == "sc":
        decoded = sc_decode(code, llr, mode)
    else:
        decoded, fell_back = scl_decode_batch(code, llr, cfg.list_size, mode, crc=code.crc, sorter=cfg.sorter)
        fallbacks = int(fell_back.sum())
    wrong = decoded != payload
    return _Counts(size, int(wrong.any(axis=1).sum()), int(wrong.sum()), fallbacks)


def _batch_plan(cfg: SimConfig, done: int, count: int) -> list[tuple[int, int]]:
    """``(batch_index, size)`` of the next ``count`` batches after ``done`` trials."""
    plan = []
    index = done // cfg.batch_size
    left = cfg.max_trials - done
    while len(plan) < count and left > 0:
        size = min(cfg.batch_size, left)
        plan.append((index, size))
        index += 1
        left -= size
    return plan


def simulate_point(cfg: SimConfig, code: PolarCode, snr_index: int, pool=None) -> FerRecord:
    start = time.perf_counter()
    counts = _Counts()
    wave = cfg.workers if pool is not None else 1
    while counts.block_errors < cfg.min_errors and counts.trials < cfg.max_trials:
        plan = _batch_plan(cfg, counts.trials, wave)
        if pool is None:
            results = [_run_batch(cfg, code, snr_index, b, size) for b, size in plan]
        else:
            futures = [pool.submit(_run_batch, cfg, code, snr_index, b, size) for b, size in plan]
            results = [f.result() for f in futures]
        for res in results:
            # stop exactly where a sequential run would
            if counts.block_errors >= cfg.min_errors:
                break
            counts.trials += res.trials
            counts.block_errors += res.block_errors
            counts.bit_errors += res.bit_errors
            counts.crc_fallbacks += res.crc_fallbacks
    return FerRecord.from_counts(
        cfg.snr[snr_index], counts.trials, counts.block_errors, counts.bit_errors, cfg.k,
        counts.crc_fallbacks, time.perf_counter() - start,
    )  # fmt: skip


class RecordWriter:
    """Append records to CSV or JSON lines, flushing after each one.

    ``wall_time_s`` is left out unless ``include_time`` is set, so repeated
    runs of one configuration produce identical files.
    """

    def __init__(self, path: str | Path, fmt: str | None = None, include_time: bool = False):
        self.path = Path(path)
        self.fmt = fmt or ("jsonl" if self.path.suffix in (".jsonl", ".json") else "csv")
        if self.fmt not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}")
        self.fields = [f.name for f in dataclasses.fields(FerRecord)]
        if not include_time:
            self.fields.remove("wall_time_s")
        self._fh = self.path.open("w", encoding="utf-8", newline="")
        if self.fmt == "csv":
            self._csv = csv.DictWriter(self._fh, fieldnames=self.fields, lineterminator="\n")
            self._csv.writeheader()
            self._fh.flush()

    def write(self, record: FerRecord) -> None:
        row = {k: v for k, v in dataclasses.asdict(record).items() if k in self.fields}
        if self.fmt == "csv":
            self._csv.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
        else:
            self._fh.write(json.dumps(row) + "\n")
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self) -> "RecordWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def run_sweep(
    cfg: SimConfig,
    out: str | Path | None = None,
    fmt: str | None = None,
    include_time: bool = False,
    code: PolarCode | None = None,
    progress=None,
) -> list[FerRecord]:
    """Simulate every SNR point of ``cfg``; records are written to ``out`` as they finish."""
    code = code or build_code(cfg)
    writer = RecordWriter(out, fmt, include_time) if out is not None else None
    pool = ProcessPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    records = []
    try:
        for idx in range(len(cfg.snr)):
            rec = simulate_point(cfg, code, idx, pool)
            records.append(rec)
            if writer:
                writer.write(rec)
            if progress:
                progress(cfg, rec)
    finally:
        if writer:
            writer.close()
        if pool:
            pool.shutdown()
    return records


@dataclass
class Comparison:
    """FER of several configurations on one SNR grid."""

    names: list[str]
    snr: tuple[float, ...]
    records: list[list[FerRecord]]
    verdicts: list[tuple[str, str, float, str]] = field(default_factory=list)

    def table(self) -> str:
        buf = io.StringIO()
        width = max(len(n) for n in self.names + ["config"])
        header = "".join(f"  {s:>24.2f}" for s in self.snr)
        buf.write(f"{'config':<{width}}{header}\n")
        for name, recs in zip(self.names, self.records):
            cells = "".join(f"  {_cell(r):>24}" for r in recs)
            buf.write(f"{name:<{width}}{cells}\n")
        if self.verdicts:
            buf.write("\n")
            for a, b, snr, verdict in self.verdicts:
                buf.write(f"{snr:5.2f} dB  {a}  vs  {b}: {verdict}\n")
        return buf.getvalue()


def _cell(r: FerRecord) -> str:
    return f"{r.fer:.2e} [{r.ci95_low:.1e},{r.ci95_high:.1e}]"


def ci_verdict(a: FerRecord, b: FerRecord) -> str:
    """``overlap``, ``lower`` (a's interval entirely below b's) or ``higher``."""
    if a.overlaps(b):
        return "overlap"
    return "lower" if a.ci95_high < b.ci95_low else "higher"


def compare_configs(configs, progress=None) -> Comparison:
    configs = list(configs)
    if len(configs) < 2:
        raise ValueError("need at least two configurations")
    grid = configs[0].snr
    if any(c.snr != grid for c in configs[1:]):
        raise ValueError("configurations use different SNR grids")
    records = [run_sweep(c, progress=progress) for c in configs]
    names = [c.name for c in configs]
    comp = Comparison(names, grid, records)
    for i in range(len(configs)):
        for j in range(i + 1, len(configs)):
            for p, snr in enumerate(grid):
                comp.verdicts.append((names[i], names[j], snr, ci_verdict(records[i][p], records[j][p])))
    return comp
