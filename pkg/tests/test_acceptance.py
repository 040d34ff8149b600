"""Acceptance suite: one test per criterion, each prints a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or ``python tests/test_acceptance.py``.
"""
import math
import time
from functools import lru_cache

import numpy as np
import pytest

from dynperm import harness
from dynperm.deg2_rewire import init_self_loops, rewire_step
from dynperm.graph_track import ComponentForest, cycle_free_largest_trajectory, run_coupled_cycle_free
from dynperm.limits import (change_of_variable_residuals, check_normalization, default_tables, phi,
                            zeta)
from dynperm.partition_chain import (extract_cycle_partition, mean_return_time, restrict_to_unit,
                                     run_split_merge, sample_poidir)
from dynperm.perm_core import (CyclePermutation, Merged, PairSource, identity,
                               sample_uniform_transposition)
from dynperm.walks import (compare_finite_vs_infinite, init_mass, update_on_effect,
                           worst_case_local_tv, worst_case_local_tv_direct)

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # running as a script
    ACCEPTANCE_LINES = []

SEED = 20261017
N_MC = 10_000
R = 200


def report(k: int, ok: bool, detail: str) -> None:
    line = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def ecdf(sample):
    ref = np.sort(np.asarray(sample))
    return lambda x: np.searchsorted(ref, x, side="right") / ref.size


@lru_cache(maxsize=None)
def experiment(dynamics: str):
    cfg = harness.ExperimentConfig(dynamics=dynamics, n=N_MC, trials=R, seed=SEED)
    recs = harness.run_experiment(cfg)
    return cfg, recs, harness.summarize(cfg, recs)


def _gate_note(summary) -> str:
    d = summary["diagnostics"]
    sens = ", ".join(f"{k}:{v['ks']:.3f}" for k, v in d["eps_exponent_sensitivity"].items())
    return (f"[limit CDF at gate s={d['gate_s']:.3f} is {d['limit_at_gate']:.3f}; "
            f"KS vs gated limit {d['ks_vs_gated_limit']:.3f}; KS by eps exponent {sens}]")


def test_c01_worked_example():
    perm = CyclePermutation.from_cycle_notation("(1,2,3,4,5,6,7)")
    perm.apply_transposition(0, 4)
    first = perm.cycle_notation()
    perm.apply_transposition(0, 4)
    back = perm.cycle_notation()
    ok = first == "(1,6,7)(2,3,4,5)" and back == "(1,2,3,4,5,6,7)"
    report(1, ok, f"(1..7)o(1,5) = {first}; applied again = {back}")
    assert ok


def test_c02_oracle_equivalence():
    from oracles import brute_cycles, isrw_step
    t0 = time.time()
    worst = 0.0
    registry_ok = True
    for n in (2, 7, 23, 50):
        rng = np.random.default_rng(SEED + n)
        perm = identity(n)
        v0 = int(rng.integers(n))
        mass = init_mass(perm, v0)
        law = np.zeros(n)
        law[v0] = 1.0
        for _ in range(1000):
            a, b = sample_uniform_transposition(rng, n)
            update_on_effect(mass, perm.apply_transposition(a, b), perm)
            law = isrw_step(law, perm.succ)
            worst = max(worst, float(np.max(np.abs(mass.element_vector(perm) - law))))
        cycles = brute_cycles(perm.succ)
        registry_ok &= perm.n_cycles == len(cycles)
        for cyc in cycles:
            labs = {perm.cycle_of(v) for v in cyc}
            registry_ok &= len(labs) == 1 and perm.size_of(labs.pop()) == len(cyc)
    dt = time.time() - t0
    ok = worst <= 1e-10 and registry_ok and dt < 10
    report(2, ok, f"max entry error {worst:.2e}, registry {'ok' if registry_ok else 'MISMATCH'}, {dt:.1f}s")
    assert ok


def test_c03_limit_numerics():
    t0 = time.time()
    u = np.linspace(0, 40, 40001)
    z = zeta(u)
    resid = float(np.max(np.abs(1 - z - np.exp(-2 * u * z))))
    sub = all(phi(v) == v for v in np.linspace(0, 0.5, 51))
    tail = abs(phi(40.0) - 1.0)
    rep = check_normalization()
    cov = float(change_of_variable_residuals(100).max())
    dt = time.time() - t0
    ok = (resid < 1e-12 and sub and tail < 1e-6 and rep.series_residual < 1e-6
          and rep.c0 == 0.5 and abs(rep.c1 - 2 / 3) < 1e-15 and cov < 1e-9 and dt < 5)
    report(3, ok, f"zeta residual {resid:.1e}; phi=v below 1/2: {sub}; |phi(40)-1| {tail:.1e}; "
                  f"series residual {rep.series_residual:.1e} (c0={rep.c0}, c1={rep.c1:.6f}); "
                  f"change of variables {cov:.1e}; {dt:.2f}s")
    assert ok


def test_c04_effective_time():
    n = 100_000
    t0 = time.time()
    tau, _ = run_coupled_cycle_free(np.random.default_rng(SEED), n, 2 * n)
    devs = {u: abs(tau[int(u * n)] / n - phi(u)) for u in (0.25, 0.5, 1.0, 2.0)}
    dt = time.time() - t0
    ok = max(devs.values()) <= 0.01 and dt < 30
    report(4, ok, "|tau(un)/n - phi(u)|: " + ", ".join(f"u={u}: {d:.4f}" for u, d in devs.items()) + f"; {dt:.1f}s")
    assert ok


def test_c05_cycle_free_giant():
    n = 100_000
    t0 = time.time()
    s = np.array([0.6, 0.8, 0.9])
    giant = cycle_free_largest_trajectory(np.random.default_rng(SEED), n, s)
    devs = np.abs(giant - default_tables().eta(s))
    dt = time.time() - t0
    ok = devs.max() <= 0.02 and dt < 30
    report(5, ok, ", ".join(f"s={a}: {g:.4f} vs eta {e:.4f}" for a, g, e in zip(s, giant, default_tables().eta(s)))
           + f"; {dt:.1f}s")
    assert ok


def _profile_at(summary, key, points):
    table = summary[key]
    return {p: table.get(f"{p:.4f}") for p in points}


def test_c06_cdp_profile():
    cfg, recs, summary = experiment("cdp")
    ks = summary["ks_vs_limit"]
    post = _profile_at(summary, "profile_deviation_post", (0.7, 0.8, 0.9))
    pre = summary["profile_deviation_pre"]
    pre_max = max(pre.values())
    ok_ks = ks <= 0.08
    ok_post = all(v is not None and v <= 0.05 for v in post.values())
    ok_pre = pre_max <= 0.01
    report(6, ok_ks and ok_post and ok_pre,
           f"KS(T/n, eta) {ks:.3f} [{'ok' if ok_ks else '> 0.08'}]; post-drop medians "
           + ", ".join(f"s={k}: {v:.4f}" for k, v in post.items())
           + f"; worst pre-drop median {pre_max:.4f} " + _gate_note(summary))
    assert ok_ks and ok_post and ok_pre


def test_c07_cfdp_profile():
    cfg, recs, summary = experiment("cfdp")
    ks = summary["ks_vs_limit"]
    post = _profile_at(summary, "profile_deviation_post", (1.0, 1.5, 2.0))
    ok_ks = ks <= 0.08
    ok_post = all(v is not None and v <= 0.05 for v in post.values())
    report(7, ok_ks and ok_post,
           f"KS(T/n, zeta) {ks:.3f} [{'ok' if ok_ks else '> 0.08'}]; post-drop medians "
           + ", ".join(f"u={k}: {v:.4f}" for k, v in post.items()) + " " + _gate_note(summary))
    assert ok_ks and ok_post


def test_c08_poisson_dirichlet():
    rng = np.random.default_rng(SEED)
    t0 = time.time()
    big = np.array([sample_poidir(rng).largest() for _ in range(100_000)])
    tail = {e: abs(np.mean(big > 1 - e) + math.log(1 - e)) for e in (0.1, 0.3)}
    reps = 10_000
    start = [sample_poidir(rng) for _ in range(reps)]
    moved = np.array([run_split_merge(p, rng, 10_000)[0].largest() for p in start])
    fresh = big[:reps]
    ks = harness.ks_distance(moved, ecdf(fresh))
    kac = {}
    for e in (0.1, 0.3):
        gap, _, _ = mean_return_time(rng, e, 1_000_000)
        kac[e] = abs(gap * -math.log(1 - e) - 1)
    dt = time.time() - t0
    ok = max(tail.values()) <= 0.01 and ks <= 0.02 and max(kac.values()) <= 0.05
    report(8, ok, "tail errors " + ", ".join(f"eps={e}: {d:.4f}" for e, d in tail.items())
           + f"; split-merge KS {ks:.4f}; Kac relative errors "
           + ", ".join(f"eps={e}: {d:.3f}" for e, d in kac.items()) + f"; {dt:.0f}s")
    assert ok


def test_c09_cfdp_cycle_structure():
    n = N_MC
    largest = []
    for trial in range(R):
        rng = harness.derive_rng_stream(SEED + 9, trial)
        perm = identity(n)
        forest = ComponentForest(n)
        src = PairSource(rng, n)
        for _ in range(int(1.5 * n)):
            a, b = src.uniform()
            perm.apply_transposition(a, b)
            forest.add_edge(a, b)
        part = restrict_to_unit(extract_cycle_partition(perm, forest.largest_total()))
        largest.append(part.blocks[0])
    ref_rng = np.random.default_rng(SEED + 90)
    ref = [sample_poidir(ref_rng).largest() for _ in range(100_000)]
    ks = harness.ks_distance(largest, ecdf(ref))
    ok = ks <= 0.05
    # a perfect sampler at R = 200 stays under 0.05 only about 30% of the time
    report(9, ok, f"KS(largest block, PoiDir(1)) {ks:.4f} over {R} trials; "
                  f"mean {np.mean(largest):.4f} vs 0.6243 "
                  f"[sampling-noise median for R={R} is about {0.83 / math.sqrt(R):.3f}]")
    assert ok


def _fspeed_trajectory(seed, n=100, steps=50):
    rng = np.random.default_rng(seed)
    perm = identity(n)
    traj, pairs = [], []
    for _ in range(steps):
        a, b = sample_uniform_transposition(rng, n)
        pairs.append((a, b))
        perm.apply_transposition(a, b)
        traj.append(perm.succ.copy())
    return traj, pairs


def test_c10_finite_speed():
    n = 100
    rho = 10 * n * n
    t0 = time.time()
    traj, pairs = _fspeed_trajectory(SEED)
    # start where the first transposition acts, so the walk is actually exercised
    v0 = pairs[0][0]
    tv = compare_finite_vs_infinite(traj, v0, rho)
    lazy = compare_finite_vs_infinite(traj, v0, rho, lazy=True)
    worst = float(tv.max())
    first_bad = int(np.argmax(tv > 0.05)) if worst > 0.05 else None
    dt = time.time() - t0
    ok = worst <= 0.05 and dt < 60
    note = ""
    if first_bad is not None:
        succ = traj[first_bad - 1]
        size = len(CyclePermutation(succ).members(CyclePermutation(succ).cycle_of(v0)))
        note = (f"; first exceeds at step {first_bad} where v0's cycle has length {size} "
                f"(non-lazy walk is periodic on even cycles)")
    report(10, ok, f"max TV {worst:.4f}{note}; lazy-walk max TV {lazy.max():.1e}; {dt:.1f}s")
    assert ok


def test_c11_degree_two():
    cfg, recs, summary = experiment("deg2")
    ks = summary["ks_vs_limit"]
    rng = np.random.default_rng(SEED + 11)
    g = init_self_loops(N_MC)
    src = PairSource(rng, N_MC)
    same = split = 0
    while same < 100_000:
        eff = rewire_step(g, src)
        if not isinstance(eff, Merged):
            same += 1
            split += type(eff).__name__ == "Split"
    frac = split / same
    ok_ks = ks <= 0.10
    ok_frac = abs(frac - 0.5) <= 0.01
    report(11, ok_ks and ok_frac,
           f"KS(T/n, zeta) {ks:.3f} [{'ok' if ok_ks else '> 0.10'}]; split fraction {frac:.4f} "
           f"over {same} same-component rewires " + _gate_note(summary))
    assert ok_ks and ok_frac


def test_c12_worst_case_bound():
    exact = all(worst_case_local_tv(M, 0, e) == e - e * e for M in (100, 1000) for e in (0.1, 0.2, 0.05))
    direct = worst_case_local_tv_direct(100, 1, 0.1)
    closed = worst_case_local_tv(100, 1, 0.1)
    ok = exact and abs(direct - closed) <= 1e-12
    report(12, ok, f"Delta=0 gives eps-eps^2: {exact}; direct {direct:.15f} vs closed form {closed:.15f}")
    assert ok


def test_c13_determinism():
    cfg = harness.ExperimentConfig(dynamics="cfdp", n=2000, trials=5, seed=SEED)
    a = harness.records_to_csv(harness.run_experiment(cfg)).encode()
    b = harness.records_to_csv(harness.run_experiment(cfg)).encode()
    ok = a == b
    report(13, ok, f"two runs: {len(a)} bytes each, identical={ok}")
    assert ok


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
