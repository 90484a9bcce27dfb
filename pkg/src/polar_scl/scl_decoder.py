"""LLR-based successive cancellation list decoding.

Each path carries the metric ``PM = sum_j ln(1 + exp(-(1 - 2 u_j) L_j))``
accumulated from its own decision LLRs; at every information bit the ``2L``
extensions are ranked by metric and the ``L`` smallest survive.

The compiled decoder stores per-path LLRs and partial sums one node per
stage (stage ``s`` at offset ``N >> s`` of a bank) and reaches them through
per-path pointer rows, so duplicating a path copies ``O(log N)`` pointers
rather than ``O(N)`` values.  This is safe because all paths rewrite the same
stages at each bit and each path only writes into its own bank.
``scl_decode_reference`` is the straightforward version with full state
copies, kept for cross-checking and for tracing the candidate lists.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .channel import decoder_input
from .codebook import PolarCode
from .crc import CrcScheme, crc_step
from .mode import EXACT, EXACT_MODE, DecoderMode
from .sc_core import ScState, _first_stage, f_minus_exact, f_minus_minsum, softplus
from .sorter import full_rank_order, pruned_rank_order, sort_existing_order

SORTERS = ("full", "pruned")


@njit(cache=True)
def metric_update_exact(mu, lam, u):
    """``mu + ln(1 + exp(-(1 - 2u) lam))``."""
    return mu + softplus(lam if u else -lam)


@njit(cache=True)
def metric_update_approx(mu, lam, u, limit=np.inf):
    """Unchanged if ``u`` follows the LLR's hard decision, else ``mu + |lam|``.

    The hard decision of ``lam = 0`` is 0.  The result saturates at ``limit``.
    """
    hard = 0 if lam >= 0.0 else 1
    if u == hard:
        return mu
    v = mu + abs(lam)
    return limit if v > limit else v


@njit(cache=True)
def metric_update(mu, lam, u, mode, limit):
    if mode == EXACT:
        return metric_update_exact(mu, lam, u)
    return metric_update_approx(mu, lam, u, limit)


@njit(cache=True)
def _select(metric, crc, active, use_crc):
    """Index of the smallest metric among CRC-passing paths (all paths if none pass)."""
    best = -1
    if use_crc:
        for q in range(active):
            if crc[q] == 0 and (best < 0 or metric[q] < metric[best]):
                best = q
        if best >= 0:
            return best, False
    best = 0
    for q in range(1, active):
        if metric[q] < metric[best]:
            best = q
    return best, use_crc


def select_output(metrics, crc_ok=None) -> tuple[int, bool]:
    """Pick the final path: ``(index, fell_back)``.

    With ``crc_ok`` the minimum metric among passing paths wins; if none
    pass, the global minimum is returned and ``fell_back`` is True.  Ties go
    to the smaller index.
    """
    metrics = np.asarray(metrics, dtype=np.float64)
    if metrics.size == 0:
        raise ValueError("no surviving paths")
    if crc_ok is None:
        idx, _ = _select(metrics, np.zeros(metrics.size, dtype=np.int64), metrics.size, False)
        return int(idx), False
    states = np.where(np.asarray(crc_ok, dtype=bool), 0, 1).astype(np.int64)
    idx, fell_back = _select(metrics, states, metrics.size, True)
    return int(idx), bool(fell_back)


# --------------------------------------------------------------------------
# compiled decoder


@njit(cache=True, inline="always")
def _push_bit(l, i, u, n, ps_mem, ps_ptr, vw):
    """Fold decision ``u`` of bit ``i`` into path ``l``'s partial sums.

    ``vw`` is a 2-row scratch buffer; rows alternate as source and target.
    """
    N = 1 << n
    s = n
    j = i
    size = 1
    cur = 0
    vw[0, 0] = u
    while s >= 1:
        off = N >> s
        if j & 1:
            if s == 1:
                return  # stage-0 sums are never read
            pb = ps_ptr[l, s]
            nxt = 1 - cur
            for t in range(size):
                x = vw[cur, t]
                vw[nxt, 2 * t] = ps_mem[pb, off + t] ^ x
                vw[nxt, 2 * t + 1] = x
            cur = nxt
            size *= 2
            s -= 1
            j >>= 1
        else:
            for t in range(size):
                ps_mem[l, off + t] = vw[cur, t]
            ps_ptr[l, s] = l
            return


@njit(cache=True, inline="always")
def _path_llr(l, i, n, mode, llr_limit, llr_mem, llr_ptr, ps_mem, ps_ptr):
    N = 1 << n
    for s in range(_first_stage(i, n), n + 1):
        node = i >> (n - s)
        size = N >> s
        src = llr_ptr[l, s - 1]
        soff = 2 * size
        # mode branches sit outside the element loops so these vectorize
        if node & 1:
            pb = ps_ptr[l, s]
            for t in range(size):
                a = llr_mem[src, soff + 2 * t]
                b = llr_mem[src, soff + 2 * t + 1]
                v = b - a if ps_mem[pb, size + t] else b + a
                llr_mem[l, size + t] = min(max(v, -llr_limit), llr_limit)
        elif mode == EXACT:
            for t in range(size):
                llr_mem[l, size + t] = f_minus_exact(llr_mem[src, soff + 2 * t], llr_mem[src, soff + 2 * t + 1])
        else:
            for t in range(size):
                llr_mem[l, size + t] = f_minus_minsum(llr_mem[src, soff + 2 * t], llr_mem[src, soff + 2 * t + 1])
        llr_ptr[l, s] = l
    return llr_mem[l, 1]


@njit(cache=True)
def _workspace(n, L, K):
    N = 1 << n
    llr_mem = np.zeros((L, 2 * N))
    ps_mem = np.zeros((L, N), dtype=np.uint8)
    ptrs = np.zeros((4, L, n + 1), dtype=np.int64)
    metric = np.zeros((2, L))
    crc = np.zeros((2, L), dtype=np.int64)
    lam = np.zeros(L)
    cand = np.zeros(2 * L)
    cint = np.zeros((5, 2 * L), dtype=np.int64)
    bbuf = np.zeros(2 * L)
    vw = np.zeros((2, N), dtype=np.uint8)
    parent = np.zeros((max(K, 1), L), dtype=np.int64)
    bits = np.zeros((max(K, 1), L), dtype=np.uint8)
    origin = np.zeros(L, dtype=np.int64)
    return llr_mem, ps_mem, ptrs, metric, crc, lam, cand, cint, bbuf, vw, parent, bits, origin


@njit(cache=True)
def _scl_one(
    ch, info_mask, u_frozen, n, L, mode, llr_limit, metric_limit, pruned, crc_r, crc_taps,
    llr_mem, ps_mem, ptrs, metric2, crc2, lam, cand, cint, bbuf, vw, parent, bits, origin,
):  # fmt: skip
    """Decode one word; returns the number of surviving paths.

    Surviving path ``q`` has metric ``metric2[0, q]`` and CRC register
    ``crc2[0, q]``; its decisions are recovered by walking ``parent``/``bits``.
    """
    N = 1 << n
    llr_ptr = ptrs[0]
    ps_ptr = ptrs[1]
    nllr_ptr = ptrs[2]
    nps_ptr = ptrs[3]
    metric = metric2[0]
    nmetric = metric2[1]
    crc = crc2[0]
    ncrc = crc2[1]
    cslot = cint[0]
    cbit = cint[1]
    order = cint[2]
    rank = cint[3]
    newu = cint[4]

    for k in range(N):
        llr_mem[0, N + k] = ch[k]
    for s in range(n + 1):
        llr_ptr[0, s] = 0
        ps_ptr[0, s] = 0
    metric[0] = 0.0
    crc[0] = 0
    origin[0] = 0
    active = 1
    unsorted = False
    j_info = 0

    for i in range(N):
        for l in range(active):
            lam[l] = _path_llr(l, i, n, mode, llr_limit, llr_mem, llr_ptr, ps_mem, ps_ptr)

        if not info_mask[i]:
            u = u_frozen[i]
            for l in range(active):
                metric[l] = metric_update(metric[l], lam[l], u, mode, metric_limit)
                _push_bit(l, i, u, n, ps_mem, ps_ptr, vw)
            if active > 1:
                unsorted = True
            continue

        if pruned and unsorted:
            # re-establish metric order after a frozen cluster
            sort_existing_order(metric, active, L, metric_limit, bbuf, order, rank, newu)
            for q in range(active):
                src = newu[q]
                nmetric[q] = metric[src]
                ncrc[q] = crc[src]
                cbit[q] = origin[src]
                bbuf[q] = lam[src]
                for s in range(n + 1):
                    nllr_ptr[q, s] = llr_ptr[src, s]
                    nps_ptr[q, s] = ps_ptr[src, s]
            for q in range(active):
                metric[q] = nmetric[q]
                crc[q] = ncrc[q]
                origin[q] = cbit[q]
                lam[q] = bbuf[q]
                for s in range(n + 1):
                    llr_ptr[q, s] = nllr_ptr[q, s]
                    ps_ptr[q, s] = nps_ptr[q, s]
        unsorted = False

        for p in range(L):
            c0 = 2 * p
            if p < active:
                mu = metric[p]
                lm = lam[p]
                first = 0
                if pruned and lm < 0.0:
                    first = 1
                cand[c0] = metric_update(mu, lm, first, mode, metric_limit)
                cand[c0 + 1] = metric_update(mu, lm, 1 - first, mode, metric_limit)
                cbit[c0] = first
                cbit[c0 + 1] = 1 - first
                cslot[c0] = p
                cslot[c0 + 1] = p
            else:
                cand[c0] = metric_limit
                cand[c0 + 1] = metric_limit
                cslot[c0] = -1
                cslot[c0 + 1] = -1
        if pruned:
            pruned_rank_order(cand, L, order, rank)
        else:
            full_rank_order(cand, L, order, rank)

        keep = min(L, 2 * active)
        for q in range(keep):
            c = order[q]
            src = cslot[c]
            u = cbit[c]
            nmetric[q] = cand[c]
            ncrc[q] = crc_step(crc[src], u, crc_r, crc_taps) if crc_r > 0 else 0
            parent[j_info, q] = origin[src]
            bits[j_info, q] = u
            newu[q] = u
            for s in range(n + 1):
                nllr_ptr[q, s] = llr_ptr[src, s]
                nps_ptr[q, s] = ps_ptr[src, s]
        for q in range(keep):
            metric[q] = nmetric[q]
            crc[q] = ncrc[q]
            origin[q] = q
            for s in range(n + 1):
                llr_ptr[q, s] = nllr_ptr[q, s]
                ps_ptr[q, s] = nps_ptr[q, s]
        active = keep
        for q in range(active):
            _push_bit(q, i, newu[q], n, ps_mem, ps_ptr, vw)
        j_info += 1
    return active


@njit(cache=True)
def _traceback(parent, bits, K, slot, out):
    q = slot
    for j in range(K - 1, -1, -1):
        out[j] = bits[j, q]
        q = parent[j, q]


@njit(cache=True)
def _scl_batch(ch, info_mask, u_frozen, n, L, mode, llr_limit, metric_limit, pruned, crc_r, crc_taps, use_crc, out, fell_back):
    B, N = ch.shape
    K = 0
    for i in range(N):
        if info_mask[i]:
            K += 1
    llr_mem, ps_mem, ptrs, metric2, crc2, lam, cand, cint, bbuf, vw, parent, bits, origin = _workspace(n, L, K)
    for b in range(B):
        active = _scl_one(
            ch[b], info_mask, u_frozen, n, L, mode, llr_limit, metric_limit, pruned, crc_r, crc_taps,
            llr_mem, ps_mem, ptrs, metric2, crc2, lam, cand, cint, bbuf, vw, parent, bits, origin,
        )  # fmt: skip
        best, fb = _select(metric2[0], crc2[0], active, use_crc)
        fell_back[b] = fb
        _traceback(parent, bits, K, origin[best], out[b])


@njit(cache=True)
def _scl_detail(ch, info_mask, u_frozen, n, L, mode, llr_limit, metric_limit, pruned, crc_r, crc_taps):
    N = ch.shape[0]
    K = 0
    for i in range(N):
        if info_mask[i]:
            K += 1
    llr_mem, ps_mem, ptrs, metric2, crc2, lam, cand, cint, bbuf, vw, parent, bits, origin = _workspace(n, L, K)
    active = _scl_one(
        ch, info_mask, u_frozen, n, L, mode, llr_limit, metric_limit, pruned, crc_r, crc_taps,
        llr_mem, ps_mem, ptrs, metric2, crc2, lam, cand, cint, bbuf, vw, parent, bits, origin,
    )  # fmt: skip
    paths = np.zeros((active, K), dtype=np.uint8)
    for q in range(active):
        _traceback(parent, bits, K, origin[q], paths[q])
    return paths, metric2[0, :active].copy(), crc2[0, :active].copy()


# --------------------------------------------------------------------------
# public API


@dataclass(frozen=True)
class SclResult:
    """Outcome of one list decode.

    ``paths`` holds the information bits (all of A, CRC included) of every
    surviving path, ``metrics`` their final path metrics, ``crc_ok`` the CRC
    verdict per path (None without CRC selection).
    """

    bits: np.ndarray
    chosen: int
    paths: np.ndarray
    metrics: np.ndarray
    crc_ok: np.ndarray | None
    crc_fallback: bool


def _resolve_crc(code: PolarCode, crc) -> CrcScheme | None:
    if crc == "auto":
        return code.crc
    if crc is not None and not isinstance(crc, CrcScheme):
        raise TypeError("crc must be a CrcScheme, None or 'auto'")
    return crc


def _prepare(code: PolarCode, L: int, mode: DecoderMode, sorter: str, crc):
    if L < 1:
        raise ValueError("list size must be at least 1")
    if sorter not in SORTERS:
        raise ValueError(f"sorter must be one of {SORTERS}")
    if sorter == "pruned" and mode.kind == "exact":
        raise ValueError("the pruned sorter needs the approximate metric (minsum or fixed mode)")
    crc = _resolve_crc(code, crc)
    llr_limit = mode.llr_limit if mode.kind == "fixed" else np.inf
    crc_r = crc.r if crc else 0
    crc_taps = crc.taps if crc else 0
    return (code.info_mask, code.u_frozen, code.n, int(L), mode.code, llr_limit,
            mode.metric_limit, sorter == "pruned", crc_r, crc_taps)  # fmt: skip


def scl_decode(
    code: PolarCode,
    channel_llrs,
    L: int,
    mode: DecoderMode = EXACT_MODE,
    crc: CrcScheme | str | None = "auto",
    sorter: str = "full",
) -> SclResult:
    """List-decode one received word.

    With a CRC (by default the one ``code`` carries; pass ``crc=None`` for
    plain list decoding) the output is the best CRC-passing path, falling
    back to the best path overall.  The
    pruned sorter is only valid with the approximate metric, since the exact
    update penalises both extensions.
    """
    args = _prepare(code, L, mode, sorter, crc)
    ch = np.ascontiguousarray(decoder_input(channel_llrs, mode))
    if ch.shape != (code.N,):
        raise ValueError(f"expected {code.N} channel LLRs, got shape {ch.shape}")
    paths, metrics, crc_states = _scl_detail(ch, *args)
    use_crc = args[-2] > 0
    crc_ok = crc_states == 0 if use_crc else None
    chosen, fell_back = select_output(metrics, crc_ok)
    bits = paths[chosen, : code.k_info].copy()
    return SclResult(bits, chosen, paths, metrics, crc_ok, fell_back)


def scl_decode_batch(
    code: PolarCode,
    channel_llrs,
    L: int,
    mode: DecoderMode = EXACT_MODE,
    crc: CrcScheme | str | None = "auto",
    sorter: str = "full",
) -> tuple[np.ndarray, np.ndarray]:
    """Decode each row; returns ``(payload bits (B, k_info), crc fallback flags (B,))``."""
    args = _prepare(code, L, mode, sorter, crc)
    ch = np.ascontiguousarray(np.atleast_2d(decoder_input(channel_llrs, mode)))
    if ch.shape[1] != code.N:
        raise ValueError(f"expected {code.N} channel LLRs per row, got {ch.shape[1]}")
    out = np.zeros((ch.shape[0], max(code.K, 1)), dtype=np.uint8)
    fell_back = np.zeros(ch.shape[0], dtype=np.bool_)
    _scl_batch(ch, *args, args[-2] > 0, out, fell_back)
    return out[:, : code.k_info], fell_back


# --------------------------------------------------------------------------
# reference decoder


@dataclass
class _Path:
    state: ScState
    metric: float
    decisions: list
    crc: int


@dataclass(frozen=True)
class TraceStep:
    """Snapshot at one information bit, before pruning.

    ``prefixes[l]`` is path ``l``'s decision history ``u_0 .. u_{i-1}``;
    ``candidates`` maps ``(l, u)`` to the extended metric.
    """

    index: int
    prefixes: list
    metrics: list
    candidates: dict
    survivors: list


def scl_decode_reference(
    code: PolarCode,
    channel_llrs,
    L: int,
    mode: DecoderMode = EXACT_MODE,
    crc: CrcScheme | str | None = "auto",
    trace: list | None = None,
) -> SclResult:
    """Slow list decoder with full state copies and a plain stable sort.

    Candidates are ranked by ``(metric, path, bit)``.  When ``trace`` is a
    list, a :class:`TraceStep` is appended at every information bit.
    """
    if L < 1:
        raise ValueError("list size must be at least 1")
    ch = decoder_input(channel_llrs, mode)
    crc = _resolve_crc(code, crc)
    limit = mode.metric_limit

    def phi(mu, lam, u):
        if mode.code == EXACT:
            return float(metric_update_exact(mu, lam, u))
        return float(metric_update_approx(mu, lam, u, limit))

    paths = [_Path(ScState(ch, mode), 0.0, [], 0)]
    for i in range(code.N):
        lams = [p.state.decision_llr(i) for p in paths]
        if not code.info_mask[i]:
            u = int(code.u_frozen[i])
            for p, lam in zip(paths, lams):
                p.metric = phi(p.metric, lam, u)
                p.decisions.append(u)
                p.state.update_partial_sums(i, u)
            continue
        cands = {(l, u): phi(p.metric, lam, u) for l, (p, lam) in enumerate(zip(paths, lams)) for u in (0, 1)}
        ranked = sorted(cands, key=lambda lu: (cands[lu], lu[0], lu[1]))
        survivors = ranked[: min(L, len(ranked))]
        if trace is not None:
            trace.append(
                TraceStep(i, [list(p.decisions) for p in paths], [p.metric for p in paths], dict(cands), survivors)
            )
        new_paths = []
        for l, u in survivors:
            src = paths[l]
            reg = crc_step(src.crc, u, crc.r, crc.taps) if crc else 0
            p = _Path(src.state.copy(), cands[(l, u)], src.decisions + [u], reg)
            p.state.update_partial_sums(i, u)
            new_paths.append(p)
        paths = new_paths

    info = code.info_indices
    all_paths = np.array([np.array(p.decisions, dtype=np.uint8)[info] for p in paths]).reshape(len(paths), code.K)
    metrics = np.array([p.metric for p in paths])
    crc_ok = np.array([p.crc == 0 for p in paths]) if crc else None
    chosen, fell_back = select_output(metrics, crc_ok)
    return SclResult(all_paths[chosen, : code.k_info].copy(), chosen, all_paths, metrics, crc_ok, fell_back)
