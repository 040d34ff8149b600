import numpy as np
import pytest

from dynperm.errors import DomainError
from dynperm.graph_track import (ComponentForest, cycle_free_largest_trajectory, dropdown_check,
                                 p_rejection, run_coupled_cycle_free)
from dynperm.perm_core import identity, sample_uniform_transposition
from dynperm.walks import init_mass, update_on_effect
from oracles import brute_components


def test_forest_matches_bfs():
    rng = np.random.default_rng(2)
    n = 80
    forest = ComponentForest(n)
    edges = []
    for _ in range(120):
        a, b = sample_uniform_transposition(rng, n)
        edges.append((a, b))
        forest.add_edge(a, b)
        comps = brute_components(n, edges)
        sizes = sorted(len(c) for c in comps)
        assert forest.largest_size == sizes[-1]
        assert forest.second_largest_size() == (sizes[-2] if len(sizes) > 1 else 0)
        assert forest.largest_total() == sizes[-1] * sizes.count(sizes[-1])
        for c in comps:
            assert len({forest.find(v) for v in c}) == 1
        assert p_rejection(forest) == pytest.approx(sum(len(c) * (len(c) - 1) for c in comps) / (n * (n - 1)))


def test_edge_bookkeeping():
    f = ComponentForest(4)
    assert f.add_edge(0, 1) and not f.add_edge(1, 0)
    assert f.edges == 2 and f.accepted == 1
    assert f.in_largest(0) and not f.in_largest(2)
    assert f.largest_root() == 0
    f2 = ComponentForest(4)
    f2.add_edge(2, 3)
    f2.add_edge(0, 1)
    assert f2.largest_total() == 4 and f2.in_largest(3)


def test_cycles_live_inside_components():
    rng = np.random.default_rng(9)
    n = 60
    perm = identity(n)
    forest = ComponentForest(n)
    for _ in range(90):
        a, b = sample_uniform_transposition(rng, n)
        perm.apply_transposition(a, b)
        forest.add_edge(a, b)
        for lab in perm.live_labels():
            roots = {forest.find(v) for v in perm.members(lab)}
            assert len(roots) == 1


def test_dropdown_gate_and_detection():
    n = 10
    perm = identity(n)
    forest = ComponentForest(n)
    mass = init_mass(perm, 0)
    for a, b in [(0, 1), (1, 2), (2, 3), (3, 4), (5, 6)]:
        update_on_effect(mass, perm.apply_transposition(a, b), perm)
        forest.add_edge(a, b)
    # 5 edges, gate at 10 * 1.1 / 2 = 5.5
    assert not dropdown_check(mass, perm, forest, 0.1)
    update_on_effect(mass, perm.apply_transposition(7, 8), perm)
    forest.add_edge(7, 8)
    assert dropdown_check(mass, perm, forest, 0.1)


def test_coupled_process_counts_accepted_edges():
    tau, forest = run_coupled_cycle_free(np.random.default_rng(0), 500, 1000)
    assert tau[0] == 0 and tau[-1] == forest.accepted
    assert np.all(np.diff(tau) >= 0) and np.all(np.diff(tau) <= 1)
    assert tau[250] == 250 or tau[250] >= 240  # almost no rejections early


def test_cycle_free_trajectory_errors():
    with pytest.raises(DomainError):
        cycle_free_largest_trajectory(np.random.default_rng(0), 100, [0.5, 1.0])
    out = cycle_free_largest_trajectory(np.random.default_rng(0), 200, [0.9, 0.2])
    assert out[0] > out[1]
