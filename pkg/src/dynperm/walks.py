"""Infinite-speed random walk (ISRW) and its finite-speed approximation.

The ISRW law is uniform on every cycle, so it is stored as one mass per
cycle label. Merges add masses, splits divide them in proportion to the
fragment sizes.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import BoundsError, ConsistencyError, DomainError
from .perm_core import CyclePermutation, Merged, Split


@dataclass
class MassProfile:
    mass: dict[int, float]
    origin: int

    def total(self) -> float:
        return sum(self.mass.values())

    def support_size(self, perm: CyclePermutation) -> int:
        return sum(perm.size_of(c) for c in self.mass)

    def element_vector(self, perm: CyclePermutation) -> np.ndarray:
        """Dense per-element law (slow; for checks and small n)."""
        out = np.zeros(perm.n)
        for lab, m in self.mass.items():
            out[perm.members(lab)] = m / perm.size_of(lab)
        return out


def init_mass(perm: CyclePermutation, v0: int) -> MassProfile:
    if not 0 <= v0 < perm.n:
        raise BoundsError(f"start vertex {v0} outside [0, {perm.n})")
    return MassProfile({perm.cycle_of(v0): 1.0}, v0)


def update_on_effect(mass: MassProfile, effect, perm_after: CyclePermutation) -> None:
    """Fold one transposition (or rewiring) effect into the per-cycle masses."""
    md = mass.mass
    if isinstance(effect, Merged):
        if not perm_after.is_live(effect.new_cycle):
            raise ConsistencyError(f"merged label {effect.new_cycle} is not live")
        m = md.pop(effect.left_cycle, 0.0) + md.pop(effect.right_cycle, 0.0)
        if m > 0.0:
            md[effect.new_cycle] = m
    elif isinstance(effect, Split):
        (la, sa), (lb, sb) = effect.frag_a, effect.frag_b
        if not (perm_after.is_live(la) and perm_after.is_live(lb)):
            raise ConsistencyError("split fragments are not live labels")
        m = md.pop(effect.old_cycle, 0.0)
        if m > 0.0:
            ma = m * sa / (sa + sb)
            md[la] = ma
            md[lb] = m - ma
    # anything else (an orientation-only rewire) leaves the masses alone


def tv_to_uniform(mass: MassProfile, perm: CyclePermutation) -> float:
    n = perm.n
    return sum(max(0.0, m - perm.size_of(c) / n) for c, m in mass.mass.items())


def tv_to_uniform_on_component(
    mass: MassProfile,
    perm: CyclePermutation,
    in_component: Callable[[int], bool],
    component_size: int,
) -> float:
    """TV distance to the uniform law on a union of cycles.

    ``in_component`` receives a representative element of a cycle. Cycles
    carry no mass off the support, so only the positive part over massive
    cycles is needed.
    """
    total = 0.0
    for c, m in mass.mass.items():
        if in_component(perm.rep_of(c)):
            total += max(0.0, m - perm.size_of(c) / component_size)
        else:
            total += m
    return total


def worst_case_local_tv(M: float, delta: float, eps: float) -> float:
    """Closed-form TV of the adversarial law mu-dagger to Unif on M + delta points."""
    if not 0 < eps < 1:
        raise DomainError("eps must lie in (0, 1)")
    if M <= 0 or delta < 0:
        raise DomainError("need M > 0 and delta >= 0")
    if eps * eps * M + delta > eps * M:
        raise DomainError("precondition eps^2 M + delta <= eps M violated")
    return eps + delta / (eps * M) - eps * eps * M / (M + delta) - delta / (M + delta)


def worst_case_local_tv_direct(M: int, delta: int, eps: float) -> float:
    """Same quantity by building mu-dagger element by element."""
    outside = eps * eps * M + delta
    inside = (1 - eps * eps) * M
    n_out = int(round(outside))
    n_in = int(round(inside))
    if abs(n_out - outside) > 1e-9 or abs(n_in - inside) > 1e-9:
        raise DomainError("direct construction needs integral block sizes")
    rest = 1.0 - outside / (eps * M)
    mu = np.concatenate([np.full(n_out, 1.0 / (eps * M)), np.full(n_in, rest / n_in)])
    target = 1.0 / (M + delta)
    return 0.5 * float(np.abs(mu - target).sum())


# finite-speed walk ---------------------------------------------------------------


def walk_matrix(succ: np.ndarray, lazy: bool = False) -> np.ndarray:
    """Transition matrix of the on-cycle walk for a fixed permutation.

    Fixed points stay put, 2-cycles swap, longer cycles step to successor
    or predecessor with probability 1/2. ``lazy`` mixes in a holding
    probability of 1/2, which removes the parity obstruction on even cycles.
    """
    n = succ.shape[0]
    pred = np.empty(n, dtype=np.int64)
    pred[succ] = np.arange(n)
    P = np.zeros((n, n))
    idx = np.arange(n)
    fixed = succ == idx
    two = (~fixed) & (succ[succ] == idx)
    long_ = ~(fixed | two)
    P[idx[fixed], idx[fixed]] = 1.0
    P[idx[two], succ[two]] = 1.0
    P[idx[long_], succ[long_]] += 0.5
    P[idx[long_], pred[long_]] += 0.5
    if lazy:
        P = 0.5 * (P + np.eye(n))
    return P


def finite_speed_run(
    trajectory: Sequence[np.ndarray], v0: int, rho: int, lazy: bool = False
) -> list[np.ndarray]:
    """Exact laws of the finite-speed walker after each block of rho steps.

    ``trajectory[i]`` is the successor array in force during block i + 1.
    Returns the law at times 0, rho, 2 rho, ... as dense vectors.
    """
    if rho < 1:
        raise DomainError("rho must be a positive integer")
    n = trajectory[0].shape[0] if trajectory else 0
    law = np.zeros(n)
    law[v0] = 1.0
    out = [law.copy()]
    for succ in trajectory:
        law = law @ np.linalg.matrix_power(walk_matrix(np.asarray(succ), lazy), rho)
        out.append(law)
    return out


def isrw_element_laws(trajectory: Sequence[np.ndarray], v0: int) -> list[np.ndarray]:
    """Element-level ISRW: average the previous law over each cycle."""
    n = trajectory[0].shape[0]
    law = np.zeros(n)
    law[v0] = 1.0
    out = [law.copy()]
    for succ in trajectory:
        perm = CyclePermutation(succ)
        cid = perm.cycle_id
        sums = np.bincount(cid, weights=law, minlength=int(cid.max()) + 1)
        counts = np.bincount(cid, minlength=int(cid.max()) + 1)
        law = sums[cid] / counts[cid]
        out.append(law)
    return out


def compare_finite_vs_infinite(
    trajectory: Sequence[np.ndarray], v0: int, rho: int, lazy: bool = False
) -> np.ndarray:
    """TV distance between the two walks after each permutation step."""
    fin = finite_speed_run(trajectory, v0, rho, lazy)
    inf = isrw_element_laws(trajectory, v0)
    return np.array([0.5 * np.abs(f - g).sum() for f, g in zip(fin, inf)])
