"""Command line entry point: ``dynperm {simulate,limits,coupling,fspeed}``."""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import harness
from .graph_track import ComponentForest
from .limits import default_tables
from .partition_chain import (
    CouplingState,
    IntervalPartition,
    coupling_step,
    count_upcrossings,
    extract_cycle_partition,
    sample_poidir,
    sup_norm_discrepancy,
)
from .perm_core import PairSource, identity
from .walks import compare_finite_vs_infinite


def _simulate(args) -> int:
    cfg = harness.ExperimentConfig(
        dynamics=args.dynamics, n=args.n, trials=args.trials, seed=args.seed,
        horizon=args.horizon, grid_step=args.grid_step, eps_exponent=args.eps_exponent,
        local_eps=args.local_eps, fixed_v0=args.fixed_v0, workers=args.workers,
    )
    records = harness.run_experiment(cfg)
    summary = harness.write_outputs(cfg, records, args.out)
    print(f"ks_vs_limit={summary['ks_vs_limit']:.4f} -> {args.out}")
    return 0


def _limits(args) -> int:
    tab = default_tables()
    m = int(round(args.umax / args.step))
    u = np.linspace(0.0, m * args.step, m + 1)
    z = tab.zeta(u)
    ph = tab.phi(u)
    eta_phi = tab.eta(ph)
    out = open(args.out, "w", newline="") if args.out != "-" else sys.stdout
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["u", "zeta", "phi", "eta_of_phi"])
    for row in zip(u, z, ph, eta_phi):
        w.writerow([f"{x:.9g}" for x in row])
    if out is not sys.stdout:
        out.close()
    return 0


def _cfdp_partition(rng, n: int, c: float):
    perm = identity(n)
    forest = ComponentForest(n)
    src = PairSource(rng, n)
    for _ in range(int(round(c * n))):
        a, b = src.uniform()
        perm.apply_transposition(a, b)
        forest.add_edge(a, b)
    return extract_cycle_partition(perm, forest.largest_total())


def _coupling(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    kappa = []
    for rep in range(args.replicas):
        rng = harness.derive_rng_stream(args.seed, rep)
        right = sample_poidir(rng, args.theta)
        if args.n:
            left = _cfdp_partition(rng, args.n, args.c)
            tol = 1.0 / math.sqrt(args.n)
        else:
            left = sample_poidir(rng, args.theta)
            tol = 1e-12
        state = CouplingState(left, IntervalPartition(right.blocks), tol)
        largest = []
        for step in range(args.steps + 1):
            if step:
                state = coupling_step(state, rng, args.theta)
            big = state.left.largest()
            largest.append(big)
            rows.append((rep, step, big, sup_norm_discrepancy(state.left, state.right)))
        kappa.append(count_upcrossings(largest, args.eps))
    with open(out_dir / "coupling.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["replica", "step", "largest_block", "sup_norm"])
        for r in rows:
            w.writerow([r[0], r[1], f"{r[2]:.9g}", f"{r[3]:.9g}"])
    (out_dir / "coupling_summary.json").write_text(json.dumps({
        "theta": args.theta, "eps": args.eps, "steps": args.steps,
        "replicas": args.replicas, "upcrossings": kappa,
    }, indent=2) + "\n")
    return 0


def _fspeed(args) -> int:
    rng = np.random.default_rng(args.seed)
    perm = identity(args.n)
    src = PairSource(rng, args.n)
    traj = []
    for _ in range(args.steps):
        a, b = src.uniform()
        perm.apply_transposition(a, b)
        traj.append(perm.succ.copy())
    v0 = int(rng.integers(args.n))
    rho = args.rho if args.rho else 10 * args.n * args.n
    tv = compare_finite_vs_infinite(traj, v0, rho, lazy=args.lazy)
    print("step,tv")
    for i, d in enumerate(tv):
        print(f"{i},{d:.9g}")
    print(f"# max_tv={tv.max():.6g} v0={v0 + 1}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dynperm", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("simulate", help="run Monte Carlo trials of one dynamics")
    s.add_argument("--dynamics", choices=harness.DYNAMICS, default="cfdp")
    s.add_argument("--n", type=int, default=1000)
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--horizon", type=float, default=None,
                   help="run length in units of n (default 3, or (n-1)/n for cdp)")
    s.add_argument("--grid-step", type=float, default=0.05)
    s.add_argument("--eps-exponent", type=float, default=-0.25)
    s.add_argument("--local-eps", type=float, default=0.05)
    s.add_argument("--fixed-v0", action="store_true", help="start every trial at element 1")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", default="out")
    s.set_defaults(func=_simulate)

    l = sub.add_parser("limits", help="tabulate zeta, phi and eta(phi)")
    l.add_argument("--umax", type=float, default=5.0)
    l.add_argument("--step", type=float, default=0.01)
    l.add_argument("--out", default="-")
    l.set_defaults(func=_limits)

    c = sub.add_parser("coupling", help="run the split-merge coupling")
    c.add_argument("--theta", type=float, default=1.0)
    c.add_argument("--eps", type=float, default=0.1)
    c.add_argument("--steps", type=int, default=1000)
    c.add_argument("--replicas", type=int, default=10)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--n", type=int, default=0,
                   help="if set, start the left side from a uniform-transposition permutation")
    c.add_argument("--c", type=float, default=1.5, help="time (units of n) of that permutation")
    c.add_argument("--out", default="out")
    c.set_defaults(func=_coupling)

    f = sub.add_parser("fspeed", help="compare the finite- and infinite-speed walks")
    f.add_argument("--n", type=int, default=100)
    f.add_argument("--rho", type=int, default=0, help="walk steps per transposition (default 10 n^2)")
    f.add_argument("--steps", type=int, default=50)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--lazy", action="store_true")
    f.set_defaults(func=_fspeed)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
