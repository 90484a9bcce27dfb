"""Functional models of the radix-2L metric sorters.

Both sorters rank the ``2L`` candidate metrics by pairwise comparisons and
count how many comparators the network needs.  Equal metrics are ordered by
position in the input list, so the output is that of a stable sort.

The pruned sorter relies on the input list ``m`` having
``m[2l] <= m[2l + 2]`` (existing metrics sorted) and ``m[2l] <= m[2l + 1]``
(each extension costs a nonnegative amount).  Under these conditions every
even-indexed entry is known to precede all later entries, and the last entry
can never be among the ``L`` smallest, leaving ``(L - 1)**2`` comparisons.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numba import njit


@njit(cache=True)
def full_rank_order(m, L, order, rank):
    """Rank all ``2L`` entries by comparing every pair; returns comparator count."""
    size = 2 * L
    for i in range(size):
        rank[i] = 0
    for i in range(size):
        mi = m[i]
        for j in range(i + 1, size):
            # branch-free: j outranks i only when strictly smaller
            c = np.int64(m[j] < mi)
            rank[i] += c
            rank[j] += 1 - c
    for i in range(size):
        order[rank[i]] = i
    return L * (2 * L - 1)


@njit(cache=True)
def pruned_rank_order(m, L, order, rank):
    """Rank using only the comparisons the presorted structure leaves open.

    Entries ``order[:L]`` are exact; the final entry is ranked last.
    """
    size = 2 * L
    last = size - 1
    used = 0
    for i in range(size):
        rank[i] = 0
    for i in range(size):
        if (i & 1) == 0:
            # even entries precede everything after them
            for j in range(i + 1, size):
                rank[j] += 1
            continue
        mi = m[i]
        for j in range(i + 1, last):
            c = np.int64(m[j] < mi)
            rank[i] += c
            rank[j] += 1 - c
        used += max(0, last - i - 1)
        if i != last:
            rank[last] += 1
    for i in range(size):
        order[rank[i]] = i
    return used


@njit(cache=True)
def sort_existing_order(a, count, L, inf, b, order, rank, perm):
    """Order the first ``count`` entries of ``a`` with the pruned network.

    Builds ``[0, a0, 0, a1, ..., 0, a_{L-2}, a_{L-1}, inf]`` (entries past
    ``count`` padded with ``inf``) and reads the ``a`` positions back in rank
    order.  Writes the permutation into ``perm[:count]``.
    """
    for l in range(L - 1):
        b[2 * l] = 0.0
        b[2 * l + 1] = a[l] if l < count else inf
    b[2 * L - 2] = a[L - 1] if L - 1 < count else inf
    b[2 * L - 1] = inf
    pruned_rank_order(b, L, order, rank)
    k = 0
    for r in range(2 * L):
        idx = order[r]
        if idx == 2 * L - 1:
            continue
        if idx == 2 * L - 2:
            l = L - 1
        elif idx & 1:
            l = (idx - 1) // 2
        else:
            continue
        if l < count:
            perm[k] = l
            k += 1


@dataclass(frozen=True)
class CandidateList:
    """``2L`` candidate metrics with provenance (source path, appended bit)."""

    metrics: np.ndarray
    paths: np.ndarray
    bits: np.ndarray

    @classmethod
    def from_metrics(cls, metrics) -> "CandidateList":
        """Entry ``2l + u`` comes from path ``l`` with bit ``u``."""
        m = np.asarray(metrics, dtype=np.float64)
        idx = np.arange(m.size)
        return cls(m, idx // 2, idx % 2)

    def __len__(self) -> int:
        return self.metrics.size


@dataclass(frozen=True)
class SortResult:
    metrics: np.ndarray
    paths: np.ndarray
    bits: np.ndarray
    positions: np.ndarray
    comparators_used: int


def _as_candidates(m) -> CandidateList:
    return m if isinstance(m, CandidateList) else CandidateList.from_metrics(m)


def _result(cands: CandidateList, order: np.ndarray, L: int, used: int) -> SortResult:
    pos = order[:L].copy()
    return SortResult(cands.metrics[pos], cands.paths[pos], cands.bits[pos], pos, int(used))


def _check_size(cands: CandidateList, L: int) -> None:
    if L < 1:
        raise ValueError("L must be positive")
    if len(cands) != 2 * L:
        raise ValueError(f"expected {2 * L} candidates, got {len(cands)}")


def full_radix_sort(m, L: int) -> SortResult:
    """The ``L`` smallest of ``2L`` candidates, comparing every pair."""
    cands = _as_candidates(m)
    _check_size(cands, L)
    order = np.empty(2 * L, dtype=np.int64)
    rank = np.empty(2 * L, dtype=np.int64)
    used = full_rank_order(cands.metrics, L, order, rank)
    return _result(cands, order, L, used)


def check_presorted(metrics) -> None:
    """Raise ``ValueError`` unless the pruned-sorter preconditions hold."""
    m = np.asarray(metrics, dtype=np.float64)
    even = m[0::2]
    odd = m[1::2]
    if np.any(even[1:] < even[:-1]):
        raise ValueError("even-indexed candidates are not sorted")
    if np.any(odd < even):
        raise ValueError("an odd-indexed candidate is below its even partner")


def pruned_radix_sort(m, L: int, validate: bool = True, sentinel: float | None = None) -> SortResult:
    """Same output as :func:`full_radix_sort` on presorted input, with ``(L-1)**2`` comparators.

    With ``validate`` the preconditions are checked first.  ``sentinel`` is
    the value standing in for +inf (the metric ceiling in fixed point); real
    metrics equal to it may be reordered, which triggers a warning.
    """
    cands = _as_candidates(m)
    _check_size(cands, L)
    if validate:
        check_presorted(cands.metrics)
        if sentinel is not None and np.any(cands.metrics[:-1] == sentinel):
            warnings.warn("a candidate metric equals the +inf sentinel", RuntimeWarning, stacklevel=2)
    order = np.empty(2 * L, dtype=np.int64)
    rank = np.empty(2 * L, dtype=np.int64)
    used = pruned_rank_order(cands.metrics, L, order, rank)
    return _result(cands, order, L, used)


def existing_metric_permutation(a, sentinel: float = np.inf) -> np.ndarray:
    """Path indices in nondecreasing metric order, via the pruned sorter."""
    a = np.asarray(a, dtype=np.float64)
    if np.any(a < 0):
        raise ValueError("metrics must be nonnegative")
    L = a.size
    b = np.empty(2 * L)
    order = np.empty(2 * L, dtype=np.int64)
    rank = np.empty(2 * L, dtype=np.int64)
    perm = np.empty(L, dtype=np.int64)
    sort_existing_order(a, L, L, sentinel, b, order, rank, perm)
    return perm


def sort_existing_metrics(a, sentinel: float = np.inf) -> np.ndarray:
    """Sort ``L`` nonnegative metrics by routing them through the pruned sorter."""
    a = np.asarray(a, dtype=np.float64)
    return a[existing_metric_permutation(a, sentinel)]


def comparator_count(kind: str, L: int) -> int:
    if kind == "full":
        return L * (2 * L - 1)
    if kind == "pruned":
        return (L - 1) ** 2
    raise ValueError(f"unknown sorter {kind!r}")
