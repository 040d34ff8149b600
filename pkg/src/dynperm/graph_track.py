"""Union-find view of the associated random graph.

Every transposition (a, b) adds the edge {a, b}. For the cross-cycle
dynamics this is the cycle-free random graph process, for uniform
transpositions it is the usual Erdos-Renyi process.
"""
from __future__ import annotations

import numpy as np

from .errors import DomainError, InvalidSizeError
from .perm_core import PairSource


class ComponentForest:
    def __init__(self, n: int):
        if n <= 0:
            raise InvalidSizeError("forest needs at least one vertex")
        self.n = n
        self.parent = list(range(n))
        self.size = [1] * n
        self.size_count = [0] * (n + 1)
        self.size_count[1] = n
        self.largest_size = 1
        self.sum_sq = n
        self.edges = 0
        self.accepted = 0

    def find(self, v: int) -> int:
        parent = self.parent
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    def add_edge(self, a: int, b: int) -> bool:
        """Record edge {a, b}; returns True when it joined two components."""
        self.edges += 1
        ra = self.find(a)
        rb = self.find(b)
        if ra == rb:
            return False
        size = self.size
        sa, sb = size[ra], size[rb]
        if sa < sb or (sa == sb and rb < ra):
            ra, rb = rb, ra
        self.parent[rb] = ra
        s = sa + sb
        size[ra] = s
        cnt = self.size_count
        cnt[sa] -= 1
        cnt[sb] -= 1
        cnt[s] += 1
        if s > self.largest_size:
            self.largest_size = s
        self.sum_sq += 2 * sa * sb
        self.accepted += 1
        return True

    def component_size(self, v: int) -> int:
        return self.size[self.find(v)]

    def in_largest(self, v: int) -> bool:
        """Membership in the union of all largest components."""
        return self.size[self.find(v)] == self.largest_size

    def largest_root(self) -> int:
        """Lowest-index root among the largest components."""
        for v in range(self.n):
            if self.parent[v] == v and self.size[v] == self.largest_size:
                return v
        raise AssertionError("no root of maximal size")

    def largest_total(self) -> int:
        """Size of C_max, the union of all largest components."""
        return self.largest_size * self.size_count[self.largest_size]

    def second_largest_size(self) -> int:
        if self.size_count[self.largest_size] >= 2:
            return self.largest_size
        for s in range(self.largest_size - 1, 0, -1):
            if self.size_count[s]:
                return s
        return 0

    def component_sizes(self) -> np.ndarray:
        return np.array([self.size[v] for v in range(self.n) if self.parent[v] == v])


def p_rejection(forest: ComponentForest) -> float:
    """Chance that a uniform pair falls inside one component."""
    n = forest.n
    if n < 2:
        return 1.0
    return (forest.sum_sq - n) / (n * (n - 1))


def dropdown_gate(n: int, eps_n: float) -> float:
    return n * (1.0 + eps_n) / 2.0


def dropdown_check(mass, perm, forest: ComponentForest, eps_n: float) -> bool:
    """Past the gate and some cycle carrying mass meets C_max."""
    if forest.edges <= dropdown_gate(forest.n, eps_n):
        return False
    for lab in mass.mass:
        if forest.in_largest(perm.rep_of(lab)):
            return True
    return False


def run_coupled_cycle_free(rng: np.random.Generator, n: int, steps: int) -> tuple[np.ndarray, ComponentForest]:
    """Run the Erdos-Renyi process and count accepted (cycle-free) edges.

    Returns tau with tau[t] = accepted edges among the first t, and the forest.
    """
    forest = ComponentForest(n)
    src = PairSource(rng, n)
    tau = np.zeros(steps + 1, dtype=np.int64)
    for t in range(1, steps + 1):
        a, b = src.uniform()
        forest.add_edge(a, b)
        tau[t] = forest.accepted
    return tau, forest


def cycle_free_largest_trajectory(
    rng: np.random.Generator, n: int, s_grid
) -> np.ndarray:
    """Largest component / n of the cycle-free process after sn accepted edges."""
    s_grid = np.asarray(s_grid, dtype=float)
    if np.any(s_grid < 0) or np.any(s_grid >= 1):
        raise DomainError("cycle-free time s must lie in [0, 1)")
    order = np.argsort(s_grid)
    targets = np.ceil(s_grid[order] * n).astype(np.int64)
    out = np.empty(s_grid.size)
    forest = ComponentForest(n)
    src = PairSource(rng, n)
    for k, i in enumerate(order):
        while forest.accepted < targets[k]:
            a, b = src.uniform()
            forest.add_edge(a, b)
        out[i] = forest.largest_size / n
    return out
