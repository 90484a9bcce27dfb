"""Polar code definitions, Monte-Carlo (genie-aided) construction, frozen-set files."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from numba import njit

from .channel import AwgnChannel
from .crc import CrcScheme, get_scheme
from .sc_core import f_minus_exact, softplus

DEFAULT_CONSTRUCTION_TRIALS = 100_000
DEFAULT_DESIGN_EBN0_DB = 2.0
_CHUNK = 2_000


@dataclass(frozen=True)
class PolarCode:
    """An ``(N, K)`` polar code.

    ``info_set`` is the strictly increasing information index set A.  When
    ``crc`` is set, the last ``crc.r`` positions of A (in A-order) carry the
    CRC of the first ``K - r`` information bits.
    """

    n: int
    info_set: tuple[int, ...]
    frozen_values: tuple[int, ...] | None = None
    crc: CrcScheme | None = None
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be at least 1")
        N = 1 << self.n
        info = tuple(int(i) for i in self.info_set)
        object.__setattr__(self, "info_set", info)
        if any(b <= a for a, b in zip(info, info[1:])):
            raise ValueError("info_set must be strictly increasing")
        if info and (info[0] < 0 or info[-1] >= N):
            raise ValueError(f"info_set indices must lie in [0, {N})")
        if self.frozen_values is None:
            object.__setattr__(self, "frozen_values", (0,) * (N - len(info)))
        fv = tuple(int(b) for b in self.frozen_values)
        object.__setattr__(self, "frozen_values", fv)
        if len(fv) != N - len(info):
            raise ValueError(f"expected {N - len(info)} frozen values, got {len(fv)}")
        if any(b not in (0, 1) for b in fv):
            raise ValueError("frozen values must be bits")
        if self.crc is not None and self.crc.r > len(info):
            raise ValueError("CRC longer than the information set")

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def K(self) -> int:
        return len(self.info_set)

    @property
    def k_info(self) -> int:
        """Payload bits, i.e. K minus the CRC length."""
        return self.K - (self.crc.r if self.crc else 0)

    @property
    def rate(self) -> float:
        """Effective information rate ``k_info / N``."""
        return self.k_info / self.N

    @cached_property
    def info_indices(self) -> np.ndarray:
        return np.array(self.info_set, dtype=np.int64)

    @cached_property
    def frozen_indices(self) -> np.ndarray:
        return np.flatnonzero(~self.info_mask)

    @cached_property
    def info_mask(self) -> np.ndarray:
        mask = np.zeros(self.N, dtype=np.bool_)
        mask[self.info_indices] = True
        return mask

    @cached_property
    def frozen_array(self) -> np.ndarray:
        return np.array(self.frozen_values, dtype=np.uint8)

    @cached_property
    def u_frozen(self) -> np.ndarray:
        """Length-N vector holding the frozen values (zeros on A)."""
        u = np.zeros(self.N, dtype=np.uint8)
        u[self.frozen_indices] = self.frozen_array
        return u


def frozen_cluster_count(code: PolarCode) -> int:
    """Number of maximal runs of consecutive frozen indices."""
    mask = code.info_mask
    frozen = ~mask
    starts = frozen.copy()
    starts[1:] &= mask[:-1]
    return int(starts.sum())


# --------------------------------------------------------------------------
# genie-aided construction


@njit(cache=True)
def _genie_chunk(llr, errors, soft):
    """Decision LLRs of every synthetic channel given the all-zero past.

    With a correct (all-zero) decision history every f+ reduces to a plain
    sum, so the whole butterfly is evaluated breadth-first.
    """
    B, N = llr.shape
    cur = np.empty(N)
    nxt = np.empty(N)
    for b in range(B):
        for k in range(N):
            cur[k] = llr[b, k]
        size = N
        while size > 1:
            half = size // 2
            nodes = N // size
            for j in range(nodes):
                base = j * size
                lo = 2 * j * half
                hi = lo + half
                for t in range(half):
                    a = cur[base + 2 * t]
                    c = cur[base + 2 * t + 1]
                    nxt[lo + t] = f_minus_exact(a, c)
                    nxt[hi + t] = a + c
            cur, nxt = nxt, cur
            size = half
        for i in range(N):
            lam = cur[i]
            # a zero LLR is a coin flip; count it against the channel
            if lam <= 0.0:
                errors[i] += 1
            # log of the consistent-LLR error estimate 1 / (1 + e^|lam|)
            term = -softplus(abs(lam))
            s = soft[i]
            if s == -np.inf:
                soft[i] = term
            else:
                m = max(s, term)
                soft[i] = m + math.log(math.exp(s - m) + math.exp(term - m))


def _construction_chunk(args):
    n, sigma2, trials, seed, chunk = args
    N = 1 << n
    rng = np.random.default_rng([seed, chunk])
    y = 1.0 + rng.standard_normal((trials, N)) * math.sqrt(sigma2)
    llr = 2.0 * y / sigma2
    errors = np.zeros(N, dtype=np.int64)
    soft = np.full(N, -np.inf)
    _genie_chunk(llr, errors, soft)
    return errors, soft


@dataclass(frozen=True)
class BitChannelEstimate:
    """Per-index genie-aided error statistics from a construction run."""

    n: int
    trials: int
    errors: np.ndarray
    log_soft: np.ndarray

    def ranking(self) -> np.ndarray:
        """Indices from most to least reliable.

        Primary key is the counted error rate; ties (common at high SNR,
        where many channels never err) fall back to the soft estimate and
        then to the lower index.
        """
        idx = np.arange(1 << self.n)
        return np.lexsort((idx, self.log_soft, self.errors))


def estimate_bit_channels(
    n: int,
    design_ebn0_db: float,
    rate: float,
    trials: int,
    seed: int,
    workers: int = 1,
) -> BitChannelEstimate:
    """Genie-aided SC over all-zero transmissions; deterministic given ``seed``.

    Trials are split into fixed chunks with their own RNG streams, so the
    result does not depend on ``workers``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if trials < 1:
        raise ValueError("trials must be positive")
    sigma2 = AwgnChannel(design_ebn0_db, rate).sigma2
    jobs = []
    done = 0
    chunk = 0
    while done < trials:
        size = min(_CHUNK, trials - done)
        jobs.append((n, sigma2, size, seed, chunk))
        done += size
        chunk += 1
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_construction_chunk, jobs))
    else:
        parts = [_construction_chunk(j) for j in jobs]
    errors = np.sum([p[0] for p in parts], axis=0)
    log_soft = np.logaddexp.reduce(np.stack([p[1] for p in parts]), axis=0) - math.log(trials)
    return BitChannelEstimate(n, trials, errors, log_soft)


_estimate_cache: dict[tuple, BitChannelEstimate] = {}


def _cached_estimate(n, design_ebn0_db, rate, trials, seed, workers) -> BitChannelEstimate:
    key = (n, float(design_ebn0_db), float(rate), int(trials), int(seed))
    if key not in _estimate_cache:
        _estimate_cache[key] = estimate_bit_channels(n, design_ebn0_db, rate, trials, seed, workers)
    return _estimate_cache[key]


def construct_monte_carlo(
    n: int,
    K: int,
    design_ebn0_db: float = DEFAULT_DESIGN_EBN0_DB,
    trials: int = DEFAULT_CONSTRUCTION_TRIALS,
    seed: int = 0,
    workers: int = 1,
) -> PolarCode:
    """Pick the ``K`` most reliable synthetic channels at the design SNR.

    The design channel uses rate ``K / N``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    N = 1 << n
    if not 0 < K <= N:
        raise ValueError(f"K must lie in (0, {N}]")
    if K == N:
        return PolarCode(n, tuple(range(N)))
    est = _cached_estimate(n, design_ebn0_db, K / N, trials, seed, workers)
    return PolarCode(n, tuple(sorted(int(i) for i in est.ranking()[:K])))


def extend_with_crc(
    n: int,
    k_info: int,
    crc: CrcScheme | None,
    design_ebn0_db: float = DEFAULT_DESIGN_EBN0_DB,
    trials: int = DEFAULT_CONSTRUCTION_TRIALS,
    seed: int = 0,
    workers: int = 1,
) -> PolarCode:
    """Code with ``k_info + r`` unfrozen positions and effective rate ``k_info / N``.

    The reliability ranking is estimated at rate ``k_info / N``, so with
    ``crc=None`` this is exactly ``construct_monte_carlo(n, k_info, ...)``.
    """
    r = crc.r if crc else 0
    N = 1 << n
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0 < k_info or k_info + r > N:
        raise ValueError(f"k_info + r = {k_info + r} does not fit in N = {N}")
    if k_info + r == N:
        return PolarCode(n, tuple(range(N)), crc=crc)
    est = _cached_estimate(n, design_ebn0_db, k_info / N, trials, seed, workers)
    info = tuple(sorted(int(i) for i in est.ranking()[: k_info + r]))
    return PolarCode(n, info, crc=crc)


# --------------------------------------------------------------------------
# frozen-set files


def format_frozen_file(code: PolarCode) -> str:
    text = f"N={code.N}\nA={','.join(str(i) for i in code.info_set)}\n"
    if code.crc is not None:
        text += f"CRC={code.crc.name}\n"
    return text


def parse_frozen_file(text: str) -> PolarCode:
    """Parse ``N=<int>`` / ``A=<increasing ints>`` (optional ``CRC=<name>`` line)."""
    fields: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"line {lineno}: expected KEY=VALUE")
        fields[key.strip().upper()] = value.strip()
    try:
        N = int(fields["N"])
        a_text = fields["A"]
    except KeyError as exc:
        raise ValueError(f"missing field {exc.args[0]}") from None
    n = N.bit_length() - 1
    if N < 2 or (1 << n) != N:
        raise ValueError(f"N={N} is not a power of two >= 2")
    info = [int(tok) for tok in a_text.split(",") if tok.strip()] if a_text else []
    if len(set(info)) != len(info):
        raise ValueError("duplicate indices in A")
    if any(not 0 <= i < N for i in info):
        raise ValueError(f"index out of range [0, {N})")
    if info != sorted(info):
        raise ValueError("A must be increasing")
    return PolarCode(n, tuple(info), crc=get_scheme(fields.get("CRC")))


def read_frozen_file(path: str | Path) -> PolarCode:
    return parse_frozen_file(Path(path).read_text(encoding="utf-8"))


def write_frozen_file(code: PolarCode, path: str | Path) -> None:
    Path(path).write_text(format_frozen_file(code), encoding="utf-8")
