"""Interval partitions, the split-merge chain and a Schramm-style coupling."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import DomainError, InsufficientDataError
from .perm_core import CyclePermutation

STICK_TRUNCATION = 1e-12


@dataclass
class IntervalPartition:
    """Block lengths laid out left to right on [0, total]."""

    blocks: np.ndarray

    @property
    def total(self) -> float:
        return float(self.blocks.sum())

    def sorted(self) -> "IntervalPartition":
        return IntervalPartition(np.sort(self.blocks)[::-1].copy())

    def largest(self) -> float:
        return float(self.blocks.max()) if self.blocks.size else 0.0


def sample_poidir(rng: np.random.Generator, theta: float = 1.0,
                  trunc: float = STICK_TRUNCATION) -> IntervalPartition:
    """Poisson-Dirichlet(theta) via stick breaking, sorted in decreasing order.

    Breaking stops once the unbroken stick is shorter than ``trunc``; that
    remainder is kept as a final block so the lengths sum to one.
    """
    if theta <= 0:
        raise DomainError("theta must be positive")
    out = []
    rest = 1.0
    while rest >= trunc:
        w = rest * rng.beta(1.0, theta)
        out.append(w)
        rest -= w
    out.append(rest)
    return IntervalPartition(np.sort(np.array(out))[::-1].copy())


def _split_merge_probs(theta: float) -> tuple[float, float]:
    return min(1.0, theta), min(1.0, 1.0 / theta)


def _apply_markers(blocks: np.ndarray, x: float, y: float, do_split: bool,
                   do_merge: bool) -> np.ndarray:
    cum = np.cumsum(blocks)
    i = min(int(np.searchsorted(cum, x, side="right")), blocks.size - 1)
    j = min(int(np.searchsorted(cum, y, side="right")), blocks.size - 1)
    if i == j:
        if not do_split:
            return blocks
        left = y - (cum[i] - blocks[i])
        right = blocks[i] - left
        if left <= 0 or right <= 0:
            return blocks
        return np.concatenate([blocks[:i], [left, right], blocks[i + 1:]])
    if not do_merge:
        return blocks
    lo, hi = min(i, j), max(i, j)
    merged = blocks[i] + blocks[j]
    return np.concatenate([blocks[:lo], [merged], blocks[lo + 1:hi], blocks[hi + 1:]])


def split_merge_step(partition: IntervalPartition, rng: np.random.Generator,
                     theta: float = 1.0) -> IntervalPartition:
    """One step: two uniform markers; same block splits at the second, else merge.

    For theta != 1 the split (theta < 1) or merge (theta > 1) is only
    accepted with probability min(1, theta) or min(1, 1/theta).
    """
    L = partition.total
    x, y, w = rng.random(3)
    ps, pm = _split_merge_probs(theta)
    out = _apply_markers(partition.blocks, x * L, y * L, w < ps, w < pm)
    return IntervalPartition(np.sort(out)[::-1].copy())


@njit(cache=True)
def _sm_kernel(buf, count, total, u, p_split, p_merge, trace):
    steps = u.shape[0]
    for t in range(steps):
        x = u[t, 0] * total
        y = u[t, 1] * total
        acc = 0.0
        i = count - 1
        for k in range(count):
            acc += buf[k]
            if x < acc:
                i = k
                break
        acc = 0.0
        start_j = 0.0
        j = count - 1
        for k in range(count):
            start_j = acc
            acc += buf[k]
            if y < acc:
                j = k
                break
        if i == j:
            if u[t, 2] < p_split:
                left = y - start_j
                right = buf[i] - left
                if left > 0.0 and right > 0.0:
                    if left >= right:
                        buf[i] = left
                        buf[count] = right
                    else:
                        buf[i] = right
                        buf[count] = left
                    count += 1
        elif u[t, 2] < p_merge:
            lo = min(i, j)
            hi = max(i, j)
            buf[lo] = buf[i] + buf[j]
            buf[hi] = buf[count - 1]
            count -= 1
            # keep big blocks near the front so the scans stop early
            while lo > 0 and buf[lo - 1] < buf[lo]:
                tmp = buf[lo - 1]
                buf[lo - 1] = buf[lo]
                buf[lo] = tmp
                lo -= 1
        if trace.shape[0] > 0:
            m = 0.0
            for k in range(count):
                if buf[k] > m:
                    m = buf[k]
            trace[t] = m
    return count


def run_split_merge(partition: IntervalPartition, rng: np.random.Generator, steps: int,
                    theta: float = 1.0, trace: bool = False, chunk: int = 1 << 16):
    """Many chain steps at once. Returns (final partition, largest-block trace)."""
    blocks = partition.blocks
    total = float(blocks.sum())
    buf = np.zeros(blocks.size + steps + 1)
    buf[: blocks.size] = np.sort(blocks)[::-1]
    count = blocks.size
    ps, pm = _split_merge_probs(theta)
    tr = np.empty(steps if trace else 0)
    done = 0
    while done < steps:
        m = min(chunk, steps - done)
        u = rng.random((m, 3))
        view = tr[done:done + m] if trace else tr
        count = _sm_kernel(buf, count, total, u, ps, pm, view)
        done += m
    final = IntervalPartition(np.sort(buf[:count])[::-1].copy())
    return final, (tr if trace else None)


def mean_return_time(rng: np.random.Generator, eps: float, budget: int,
                     theta: float = 1.0, start: IntervalPartition | None = None):
    """Average gap between visits to {largest block > 1 - eps}.

    Returns (mean_gap, occupation_fraction, visits).
    """
    if not 0 < eps < 1:
        raise DomainError("eps must lie in (0, 1)")
    start = sample_poidir(rng, theta) if start is None else start
    _, tr = run_split_merge(start, rng, budget, theta, trace=True)
    hits = np.flatnonzero(tr > 1.0 - eps)
    if hits.size < 2:
        raise InsufficientDataError(f"only {hits.size} visits within {budget} steps")
    gap = (hits[-1] - hits[0]) / (hits.size - 1)
    return float(gap), hits.size / budget, int(hits.size)


def extract_cycle_partition(perm: CyclePermutation, cmax_size: int) -> IntervalPartition:
    """Cycle lengths divided by |C_max|, largest first."""
    if cmax_size <= 0:
        raise DomainError("cmax_size must be positive")
    sizes = np.sort(perm.cycle_sizes())[::-1]
    return IntervalPartition(sizes / float(cmax_size))


def restrict_to_unit(partition: IntervalPartition) -> IntervalPartition:
    """The part of the current layout that lies inside [0, 1]."""
    cum = np.cumsum(partition.blocks)
    start = cum - partition.blocks
    keep = start < 1.0
    return IntervalPartition(np.minimum(cum[keep], 1.0) - start[keep])


def sup_norm_discrepancy(a: IntervalPartition, b: IntervalPartition) -> float:
    x = np.sort(a.blocks)[::-1]
    y = np.sort(b.blocks)[::-1]
    m = max(x.size, y.size)
    x = np.pad(x, (0, m - x.size))
    y = np.pad(y, (0, m - y.size))
    return float(np.abs(x - y).max()) if m else 0.0


def count_upcrossings(series, eps: float) -> int:
    """Number of i with series[i-1] < 1 - eps <= series[i]."""
    s = np.asarray(series, dtype=float)
    level = 1.0 - eps
    if s.size < 2:
        return 0
    return int(np.count_nonzero((s[:-1] < level) & (s[1:] >= level)))


# coupling ------------------------------------------------------------------------


@dataclass
class CouplingState:
    """left lives on [0, L] with L >= 1, right on [0, 1]."""

    left: IntervalPartition
    right: IntervalPartition
    match_tol: float = 1e-12
    matched: list[tuple[float, float]] = field(default_factory=list)


def _match(left: np.ndarray, right: np.ndarray, tol: float):
    """Greedy first-fit by decreasing size; returns index pairs."""
    li = np.argsort(-left, kind="stable")
    ri = np.argsort(-right, kind="stable")
    used = np.zeros(right.size, dtype=bool)
    pairs = []
    for i in li:
        for j in ri:
            if not used[j] and abs(left[i] - right[j]) <= tol:
                used[j] = True
                pairs.append((int(i), int(j)))
                break
    return pairs


def _layout(blocks: np.ndarray, matched_idx: list[int]) -> np.ndarray:
    mask = np.zeros(blocks.size, dtype=bool)
    mask[matched_idx] = True
    free = np.sort(blocks[~mask])[::-1]
    # matched blocks keep the pair order given by the caller
    return np.concatenate([free, blocks[matched_idx]])


def coupling_step(state: CouplingState, rng: np.random.Generator, theta: float = 1.0) -> CouplingState:
    """Match, lay out, then move both sides with shared markers.

    Matched blocks sit at the right end of each side, so after shifting the
    right partition by L - 1 they occupy the same positions. Unmatched
    blocks are packed from the left. The right side only moves when both
    markers land in its window.
    """
    left, right = state.left.blocks, state.right.blocks
    pairs = _match(left, right, state.match_tol)
    lay_l = _layout(left, [i for i, _ in pairs])
    lay_r = _layout(right, [j for _, j in pairs])
    L = float(lay_l.sum())
    shift = L - float(lay_r.sum())
    x, y, w = rng.random(3)
    x *= L
    y *= L
    ps, pm = _split_merge_probs(theta)
    new_l = _apply_markers(lay_l, x, y, w < ps, w < pm)
    new_r = lay_r
    if x >= shift and y >= shift:
        new_r = _apply_markers(lay_r, x - shift, y - shift, w < ps, w < pm)
    new_l = np.sort(new_l)[::-1]
    new_r = np.sort(new_r)[::-1]
    pairs = _match(new_l, new_r, state.match_tol)
    matched = [(float(new_l[i]), float(new_r[j])) for i, j in pairs]
    return CouplingState(IntervalPartition(new_l), IntervalPartition(new_r), state.match_tol, matched)
