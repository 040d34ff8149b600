"""Random 2-regular multigraph under edge rewiring.

Each component is a cycle. Orienting every cycle turns the graph into a
permutation: the edge leaving v is (v, nxt[v]), so picking two distinct
edges uniformly is the same as picking two distinct tails a != b.

For tails a, b with heads a' = nxt[a], b' = nxt[b] the two re-pairings are

    swap:    {a, b'} and {b, a'}   (a successor swap)
    reverse: {a, b}  and {a', b'}  (needs part of a cycle reversed)

On different cycles both merge. On one cycle "swap" splits and "reverse"
keeps the component, so a same-component rewire splits with probability 1/2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import InvalidSizeError
from .perm_core import CyclePermutation, Merged, PairSource, Split
from .walks import MassProfile, update_on_effect


@dataclass(frozen=True, slots=True)
class Preserved:
    component: int
    applied_pair: tuple[int, int]


class Deg2Graph(CyclePermutation):
    """Oriented 2-regular multigraph. ``succ`` doubles as the nxt array."""

    def __init__(self, succ: np.ndarray):
        super().__init__(succ)
        self.prv = np.empty(self.n, dtype=np.int64)
        self.prv[self.succ] = np.arange(self.n)

    @property
    def nxt(self) -> np.ndarray:
        return self.succ

    def edges(self) -> list[tuple[int, int]]:
        return [(v, int(w)) for v, w in enumerate(self.succ)]

    def apply_transposition(self, a: int, b: int):
        eff = super().apply_transposition(a, b)
        self.prv[self.succ[a]] = a
        self.prv[self.succ[b]] = b
        return eff

    def rewire(self, a: int, b: int, reverse: bool):
        """Re-pair the edges leaving a and b. Returns Merged, Split or Preserved."""
        if not reverse:
            return self.apply_transposition(a, b)
        self._check_pair(a, b)
        nxt, prv = self.succ, self.prv
        a1, b1 = int(nxt[a]), int(nxt[b])
        ca, cb = int(self.cycle_id[a]), int(self.cycle_id[b])
        self.version += 1
        if ca == cb:
            which, _ = K.shorter_arc(nxt, a1, b, b1, a)
            if which == 0:
                K.reverse_path(nxt, prv, a1, b)
                nxt[a], prv[b] = b, a
                nxt[a1], prv[b1] = b1, a1
            else:
                K.reverse_path(nxt, prv, b1, a)
                nxt[b], prv[a] = a, b
                nxt[b1], prv[a1] = a1, b1
            return Preserved(ca, (a, b))
        sa, sb = int(self._size[ca]), int(self._size[cb])
        if sa <= sb:
            keep, drop = cb, ca
            K.reverse_and_relabel_cycle(nxt, prv, self.cycle_id, a, keep)
            nxt[b], prv[a] = a, b
            nxt[a1], prv[b1] = b1, a1
        else:
            keep, drop = ca, cb
            K.reverse_and_relabel_cycle(nxt, prv, self.cycle_id, b, keep)
            nxt[a], prv[b] = b, a
            nxt[b1], prv[a1] = a1, b1
        self._size[keep] = sa + sb
        self._size[drop] = 0
        self._rep[drop] = -1
        self.n_cycles -= 1
        self.sum_sq += 2 * sa * sb
        return Merged(ca, cb, keep, sa + sb, (a, b))


def init_self_loops(n: int) -> Deg2Graph:
    if n <= 0:
        raise InvalidSizeError("graph needs at least one vertex")
    return Deg2Graph(np.arange(n, dtype=np.int64))


def rewire_step(graph: Deg2Graph, rng: np.random.Generator | PairSource):
    """Pick two distinct edges and one of the two re-pairings uniformly."""
    if isinstance(rng, PairSource):
        a, b = rng.uniform()
        bit = rng.coin()
    else:
        a = int(rng.integers(graph.n))
        b = int(rng.integers(graph.n - 1))
        b += b >= a
        bit = rng.random() < 0.5
    return graph.rewire(a, b, bit)


def isrw_profile_deg2(mass: MassProfile, effect, graph: Deg2Graph) -> None:
    """Components play the role of cycles; orientation flips change nothing."""
    if isinstance(effect, (Merged, Split)):
        update_on_effect(mass, effect, graph)
