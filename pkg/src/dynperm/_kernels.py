"""Compiled inner loops for walking and relabelling cycles.

Everything here operates on plain int64 arrays so the Python classes stay
in charge of bookkeeping.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def relabel_cycle(succ, cycle_id, start, label):
    x = start
    count = 0
    while True:
        cycle_id[x] = label
        count += 1
        x = succ[x]
        if x == start:
            break
    return count


@njit(cache=True)
def shorter_arc(succ, x0, stop_x, y0, stop_y):
    """Walk x0 -> ... -> stop_x and y0 -> ... -> stop_y in lockstep.

    Returns (which, length): which is 0 if the x walk ended first.
    Length counts elements including both endpoints.
    """
    x = x0
    y = y0
    k = 1
    while True:
        if x == stop_x:
            return 0, k
        if y == stop_y:
            return 1, k
        x = succ[x]
        y = succ[y]
        k += 1


@njit(cache=True)
def split_after_swap(succ, cycle_id, a, b, new_label):
    """Relabel the smaller of the two fragments created by a successor swap.

    Must be called after succ[a] and succ[b] were exchanged, with a and b
    previously on one cycle. Returns (relabelled_contains_b, size).
    """
    which, k = shorter_arc(succ, succ[a], a, succ[b], b)
    start = a if which == 0 else b
    relabel_cycle(succ, cycle_id, start, new_label)
    return which, k


@njit(cache=True)
def reverse_path(nxt, prv, start, stop):
    """Swap nxt/prv for every vertex on the path start -> ... -> stop."""
    x = start
    while True:
        following = nxt[x]
        nxt[x] = prv[x]
        prv[x] = following
        if x == stop:
            break
        x = following


@njit(cache=True)
def reverse_and_relabel_cycle(nxt, prv, cycle_id, start, label):
    x = start
    while True:
        following = nxt[x]
        nxt[x] = prv[x]
        prv[x] = following
        cycle_id[x] = label
        x = following
        if x == start:
            break


@njit(cache=True)
def cycle_members(succ, start):
    out = np.empty(succ.shape[0], dtype=np.int64)
    x = start
    k = 0
    while True:
        out[k] = x
        k += 1
        x = succ[x]
        if x == start:
            break
    return out[:k]
