"""Permutations stored as successor arrays with a live cycle registry.

Elements are 0-based in the Python API. Cycle notation strings (parsing and
printing) are 1-based.

Composition convention: applying the transposition (a, b) to ``perm`` gives
``perm o (a b)``, i.e. the successors of a and b are exchanged.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from . import _kernels as K
from .errors import (
    BoundsError,
    ExhaustedDynamicsError,
    InvalidSizeError,
    InvalidTranspositionError,
)

# rejection sampling of cross-cycle pairs is abandoned above this rate
REJECTION_SWITCH = 0.9


@dataclass(frozen=True, slots=True)
class Merged:
    left_cycle: int
    right_cycle: int
    new_cycle: int
    new_size: int
    applied_pair: tuple[int, int]


@dataclass(frozen=True, slots=True)
class Split:
    """frag_a / frag_b are (label, size) for the fragments holding a and b."""

    old_cycle: int
    frag_a: tuple[int, int]
    frag_b: tuple[int, int]
    applied_pair: tuple[int, int]


TranspositionEffect = Union[Merged, Split]


class CyclePermutation:
    """A permutation of {0..n-1} with O(1) cycle lookup.

    Labels come from a monotone counter and are never reused. Each live
    label has a size and a representative element.
    """

    def __init__(self, succ: np.ndarray):
        succ = np.asarray(succ, dtype=np.int64)
        n = succ.shape[0]
        if n == 0:
            raise InvalidSizeError("permutation must have at least one element")
        if not np.array_equal(np.sort(succ), np.arange(n)):
            raise ValueError("succ is not a permutation")
        self.n = int(n)
        self.succ = succ.copy()
        self.cycle_id = np.full(n, -1, dtype=np.int64)
        cap = max(16, 2 * n)
        self._size = np.zeros(cap, dtype=np.int64)
        self._rep = np.full(cap, -1, dtype=np.int64)
        self._next_label = 0
        self.n_cycles = 0
        self.sum_sq = 0  # sum of squared cycle sizes
        self.version = 0
        for v in range(n):
            if self.cycle_id[v] < 0:
                lab = self._new_label()
                size = K.relabel_cycle(self.succ, self.cycle_id, v, lab)
                self._size[lab] = size
                self._rep[lab] = v
                self.n_cycles += 1
                self.sum_sq += size * size

    # registry -------------------------------------------------------------
    def _new_label(self) -> int:
        lab = self._next_label
        if lab >= self._size.shape[0]:
            grow = self._size.shape[0]
            self._size = np.concatenate([self._size, np.zeros(grow, dtype=np.int64)])
            self._rep = np.concatenate([self._rep, np.full(grow, -1, dtype=np.int64)])
        self._next_label += 1
        return lab

    def is_live(self, label: int) -> bool:
        return 0 <= label < self._next_label and self._size[label] > 0

    def size_of(self, label: int) -> int:
        return int(self._size[label])

    def rep_of(self, label: int) -> int:
        return int(self._rep[label])

    def cycle_of(self, v: int) -> int:
        return int(self.cycle_id[v])

    def live_labels(self) -> np.ndarray:
        return np.flatnonzero(self._size[: self._next_label] > 0)

    def cycle_sizes(self) -> np.ndarray:
        s = self._size[: self._next_label]
        return s[s > 0]

    def rejection_rate(self) -> float:
        """Probability that a uniform pair lands inside one cycle."""
        n = self.n
        if n < 2:
            return 1.0
        return (self.sum_sq - n) / (n * (n - 1))

    def members(self, label: int) -> np.ndarray:
        return K.cycle_members(self.succ, self._rep[label])

    # surgery ----------------------------------------------------------------
    def _check_pair(self, a: int, b: int) -> None:
        if not (0 <= a < self.n and 0 <= b < self.n):
            raise BoundsError(f"elements ({a}, {b}) outside [0, {self.n})")
        if a == b:
            raise InvalidTranspositionError("a transposition needs two distinct elements")

    def apply_transposition(self, a: int, b: int) -> TranspositionEffect:
        self._check_pair(a, b)
        succ = self.succ
        ca = int(self.cycle_id[a])
        cb = int(self.cycle_id[b])
        sa = int(self._size[ca])
        self.version += 1
        if ca != cb:
            sb = int(self._size[cb])
            if sa >= sb:
                keep, drop, start = ca, cb, b
            else:
                keep, drop, start = cb, ca, a
            K.relabel_cycle(succ, self.cycle_id, start, keep)
            succ[a], succ[b] = succ[b], succ[a]
            new_size = sa + sb
            self._size[keep] = new_size
            self._size[drop] = 0
            self._rep[drop] = -1
            self.n_cycles -= 1
            self.sum_sq += 2 * sa * sb
            return Merged(ca, cb, keep, new_size, (a, b))
        succ[a], succ[b] = succ[b], succ[a]
        new = self._new_label()
        which, k = K.split_after_swap(succ, self.cycle_id, a, b, new)
        rest = sa - k
        self._size[new] = k
        self._size[ca] = rest
        if which == 0:
            self._rep[new], self._rep[ca] = a, b
            frag_a, frag_b = (new, k), (ca, rest)
        else:
            self._rep[new], self._rep[ca] = b, a
            frag_a, frag_b = (ca, rest), (new, k)
        self.n_cycles += 1
        self.sum_sq += k * k + rest * rest - sa * sa
        return Split(ca, frag_a, frag_b, (a, b))

    # views ---------------------------------------------------------------------
    def cycles(self) -> list[list[int]]:
        """Cycles as 0-based lists, each starting at its minimum, sorted by it."""
        seen = np.zeros(self.n, dtype=bool)
        out = []
        for v in range(self.n):
            if not seen[v]:
                cyc = K.cycle_members(self.succ, v).tolist()
                seen[cyc] = True
                out.append(cyc)
        return out

    def cycle_notation(self, include_fixed: bool = True) -> str:
        parts = []
        for cyc in self.cycles():
            if len(cyc) == 1 and not include_fixed:
                continue
            parts.append("(" + ",".join(str(x + 1) for x in cyc) + ")")
        return "".join(parts) if parts else "()"

    @classmethod
    def from_cycle_notation(cls, text: str, n: int | None = None) -> "CyclePermutation":
        """Parse 1-based notation like ``(1,6,7)(2,3,4,5)``."""
        groups = re.findall(r"\(([^)]*)\)", text)
        cycles = [[int(tok) - 1 for tok in re.split(r"[,\s]+", g.strip()) if tok] for g in groups]
        top = max((max(c) for c in cycles if c), default=-1) + 1
        n = top if n is None else n
        return cls.from_cycles(cycles, n)

    @classmethod
    def from_cycles(cls, cycles: Iterable[Iterable[int]], n: int) -> "CyclePermutation":
        if n <= 0:
            raise InvalidSizeError("permutation must have at least one element")
        succ = np.arange(n, dtype=np.int64)
        for cyc in cycles:
            cyc = list(cyc)
            for i, x in enumerate(cyc):
                if not 0 <= x < n:
                    raise BoundsError(f"element {x} outside [0, {n})")
                succ[x] = cyc[(i + 1) % len(cyc)]
        return cls(succ)

    def copy(self) -> "CyclePermutation":
        other = object.__new__(type(self))
        other.__dict__.update({k: (v.copy() if isinstance(v, np.ndarray) else v)
                               for k, v in self.__dict__.items()})
        return other


def identity(n: int) -> CyclePermutation:
    if n <= 0:
        raise InvalidSizeError("permutation must have at least one element")
    return CyclePermutation(np.arange(n, dtype=np.int64))


def apply_transposition(perm: CyclePermutation, a: int, b: int) -> TranspositionEffect:
    return perm.apply_transposition(a, b)


def largest_cycle(perm: CyclePermutation) -> tuple[int, int]:
    """(label, size) of a largest cycle; ties go to the lowest representative."""
    labels = perm.live_labels()
    sizes = perm._size[labels]
    top = sizes.max()
    cands = labels[sizes == top]
    best = cands[np.argmin(perm._rep[cands])]
    return int(best), int(top)


def sample_uniform_transposition(rng: np.random.Generator, n: int) -> tuple[int, int]:
    if n < 2:
        raise InvalidSizeError("need n >= 2 to draw a transposition")
    a = int(rng.integers(n))
    b = int(rng.integers(n - 1))
    if b >= a:
        b += 1
    return a, b


def _two_stage_cross(u1: float, u2: float, perm: CyclePermutation) -> tuple[int, int]:
    # a with weight n - |cycle(a)|, then b uniform outside cycle(a)
    n = perm.n
    w = n - perm._size[perm.cycle_id]
    cum = np.cumsum(w)
    a = int(np.searchsorted(cum, u1 * cum[-1], side="right"))
    a = min(a, n - 1)
    outside = np.flatnonzero(perm.cycle_id != perm.cycle_id[a])
    b = int(outside[min(int(u2 * outside.size), outside.size - 1)])
    return a, b


def sample_cross_cycle_transposition(rng: np.random.Generator, perm: CyclePermutation) -> tuple[int, int]:
    """Uniform over pairs {a, b} lying on different cycles."""
    if perm.n_cycles <= 1:
        raise ExhaustedDynamicsError("permutation is a single cycle")
    if perm.rejection_rate() > REJECTION_SWITCH:
        return _two_stage_cross(rng.random(), rng.random(), perm)
    cid = perm.cycle_id
    while True:
        a, b = sample_uniform_transposition(rng, perm.n)
        if cid[a] != cid[b]:
            return a, b


class PairSource:
    """Buffered version of the two samplers above, for long trajectories."""

    def __init__(self, rng: np.random.Generator, n: int, batch: int = 4096):
        if n < 2:
            raise InvalidSizeError("need n >= 2 to draw a transposition")
        self.rng = rng
        self.n = n
        self.batch = batch
        self._a: list[int] = []
        self._b: list[int] = []
        self._i = 0
        self._coins: list[bool] = []
        self._j = 0

    def _refill(self) -> None:
        a = self.rng.integers(self.n, size=self.batch)
        b = self.rng.integers(self.n - 1, size=self.batch)
        b += b >= a
        self._a = a.tolist()
        self._b = b.tolist()
        self._i = 0

    def uniform(self) -> tuple[int, int]:
        if self._i >= len(self._a):
            self._refill()
        i = self._i
        self._i = i + 1
        return self._a[i], self._b[i]

    def coin(self) -> bool:
        """Fair bit, drawn from its own buffer."""
        if self._j >= len(self._coins):
            self._coins = (self.rng.random(self.batch) < 0.5).tolist()
            self._j = 0
        j = self._j
        self._j = j + 1
        return self._coins[j]

    def cross_cycle(self, perm: CyclePermutation) -> tuple[int, int]:
        if perm.n_cycles <= 1:
            raise ExhaustedDynamicsError("permutation is a single cycle")
        if perm.rejection_rate() > REJECTION_SWITCH:
            return _two_stage_cross(self.rng.random(), self.rng.random(), perm)
        cid = perm.cycle_id
        while True:
            a, b = self.uniform()
            if cid[a] != cid[b]:
                return a, b
