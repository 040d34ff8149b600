"""Monte Carlo driver for the three dynamics, plus the statistics used on it."""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .deg2_rewire import Preserved, init_self_loops
from .errors import InsufficientDataError
from .graph_track import ComponentForest, dropdown_check, dropdown_gate
from .limits import default_tables
from .perm_core import Merged, PairSource, Split, identity, largest_cycle
from .walks import init_mass, tv_to_uniform, tv_to_uniform_on_component, update_on_effect

DYNAMICS = ("cdp", "cfdp", "deg2")
CSV_COLUMNS = ["trial", "v0", "t", "s", "tv", "cmax_frac", "largest_cycle_frac",
               "support_size", "dropped"]


@dataclass
class ExperimentConfig:
    dynamics: str = "cfdp"
    n: int = 1000
    trials: int = 10
    seed: int = 0
    horizon: float | None = None  # in units of n; default 3 (or (n-1)/n for cdp)
    grid_step: float = 0.05
    eps_exponent: float = -0.25
    local_eps: float = 0.05
    fixed_v0: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.dynamics not in DYNAMICS:
            raise ValueError(f"dynamics must be one of {DYNAMICS}")
        if self.n < 2:
            raise ValueError("n must be at least 2")

    @property
    def eps_n(self) -> float:
        return self.n ** self.eps_exponent

    def horizon_steps(self) -> int:
        if self.dynamics == "cdp":
            cap = self.n - 1
            return cap if self.horizon is None else min(cap, int(round(self.horizon * self.n)))
        h = 3.0 if self.horizon is None else self.horizon
        return int(round(h * self.n))

    def grid_times(self) -> list[int]:
        T = self.horizon_steps()
        out = []
        k = 1
        while True:
            t = int(round(k * self.grid_step * self.n))
            if t > T:
                break
            if not out or t != out[-1]:
                out.append(t)
            k += 1
        return out


@dataclass
class TrialRecord:
    trial: int
    v0: int
    dropdown_time: int | None
    local_mixing_time: int | None
    rows: list[tuple] = field(default_factory=list)
    # (t, in C_max) each time v0's membership in C_max flips, after n/2 edges
    membership: list[tuple[int, bool]] = field(default_factory=list)
    same_component_events: int = 0
    same_component_splits: int = 0


def derive_rng_stream(master_seed: int, trial_id: int) -> np.random.Generator:
    """Independent PCG64 stream per trial from numpy's SeedSequence spawn keys."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(master_seed, spawn_key=(trial_id,))))


def run_trial(cfg: ExperimentConfig, trial: int) -> TrialRecord:
    n = cfg.n
    rng = derive_rng_stream(cfg.seed, trial)
    v0 = 0 if cfg.fixed_v0 else int(rng.integers(n))
    deg2 = cfg.dynamics == "deg2"
    perm = init_self_loops(n) if deg2 else identity(n)
    mass = init_mass(perm, v0)
    forest = ComponentForest(n)
    src = PairSource(rng, n)
    gate = dropdown_gate(n, cfg.eps_n)
    half = n / 2.0
    grid = cfg.grid_times()
    grid_set = set(grid)
    rec = TrialRecord(trial, v0, None, None)
    member = None
    T = cfg.horizon_steps()

    def in_cmax(v: int) -> bool:
        return forest.in_largest(v)

    for t in range(1, T + 1):
        if cfg.dynamics == "cdp":
            a, b = src.cross_cycle(perm)
            eff = perm.apply_transposition(a, b)
        elif cfg.dynamics == "cfdp":
            a, b = src.uniform()
            eff = perm.apply_transposition(a, b)
        else:
            a, b = src.uniform()
            eff = perm.rewire(a, b, src.coin())
            if not isinstance(eff, Merged):
                rec.same_component_events += 1
                if isinstance(eff, Split):
                    rec.same_component_splits += 1
        if not isinstance(eff, Preserved):
            update_on_effect(mass, eff, perm)
        forest.add_edge(a, b)
        if t > half:
            now = forest.in_largest(v0)
            if now != member:
                rec.membership.append((t, now))
                member = now
        if rec.dropdown_time is None:
            if t > gate and dropdown_check(mass, perm, forest, cfg.eps_n):
                rec.dropdown_time = t
        elif rec.local_mixing_time is None:
            d = tv_to_uniform_on_component(mass, perm, in_cmax, forest.largest_total())
            if d < cfg.local_eps:
                rec.local_mixing_time = t
        if t in grid_set:
            dropped = rec.dropdown_time is not None
            rec.rows.append((
                trial, v0 + 1, t, t / n, tv_to_uniform(mass, perm),
                forest.largest_total() / n, largest_cycle(perm)[1] / n,
                mass.support_size(perm), int(dropped),
            ))
    return rec


def dropdown_from_membership(membership: Sequence[tuple[int, bool]], gate: float) -> int | None:
    """First t > gate at which v0 sits in C_max, rebuilt from the flip log."""
    first = math.floor(gate) + 1
    for i, (t, flag) in enumerate(membership):
        end = membership[i + 1][0] if i + 1 < len(membership) else math.inf
        if flag and end > first:
            return max(t, first)
    return None


def run_experiment(cfg: ExperimentConfig) -> list[TrialRecord]:
    ids = range(cfg.trials)
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            recs = list(pool.map(run_trial, [cfg] * cfg.trials, ids))
    else:
        recs = [run_trial(cfg, i) for i in ids]
    return sorted(recs, key=lambda r: r.trial)


# statistics ----------------------------------------------------------------------


def ks_distance(samples: Sequence[float], cdf: Callable, cdf_left: Callable | None = None) -> float:
    """One-sample KS statistic; infinite samples count as F = 1.

    Without ``cdf_left`` this is the textbook sample-point formula for a
    continuous F. With it (F(x-) for laws with atoms) the exact
    sup |F_R - F| is returned, tie groups included.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    R = x.size
    if R == 0:
        raise InsufficientDataError("KS statistic needs at least one sample")

    def ev(fn, pts):
        out = np.ones(pts.size)
        fin = np.isfinite(pts)
        out[fin] = np.asarray(fn(pts[fin]), dtype=float)
        return out

    if cdf_left is None:
        F = ev(cdf, x)
        i = np.arange(1, R + 1)
        return float(max(np.abs(i / R - F).max(), np.abs((i - 1) / R - F).max()))
    vals, counts = np.unique(x, return_counts=True)
    hi = np.cumsum(counts) / R
    lo = hi - counts / R
    return float(max(np.abs(hi - ev(cdf, vals)).max(), np.abs(lo - ev(cdf_left, vals)).max()))


def limit_cdf(dynamics: str) -> Callable:
    tab = default_tables()
    return tab.eta if dynamics == "cdp" else tab.zeta


def gated_cdf(cdf: Callable, gate_s: float) -> tuple[Callable, Callable]:
    """Limit law with all mass below the gate moved onto it: (F, F(x-))."""
    def f(x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= gate_s, cdf(x), 0.0)

    def f_left(x):
        x = np.asarray(x, dtype=float)
        return np.where(x > gate_s, cdf(x), 0.0)
    return f, f_left


def dropdown_samples(records: Sequence[TrialRecord], n: int) -> np.ndarray:
    return np.array([math.inf if r.dropdown_time is None else r.dropdown_time / n for r in records])


def compare_profile(records: Sequence[TrialRecord], limit_fn: Callable, grid: Sequence[float],
                    n: int, dropdown_aware: bool = True) -> tuple[dict, dict]:
    """Median |tv - target| per grid point, split into pre- and post-drop trials.

    Post-drop target is 1 - limit(s), pre-drop target is 1. Without
    ``dropdown_aware`` every trial is measured against the post-drop curve.
    """
    pre: dict[float, float] = {}
    post: dict[float, float] = {}
    for s in grid:
        t = int(round(s * n))
        lim = float(limit_fn(s))
        dev_pre, dev_post = [], []
        for r in records:
            row = next((row for row in r.rows if row[2] == t), None)
            if row is None:
                continue
            tv = row[4]
            if dropdown_aware and (r.dropdown_time is None or t <= r.dropdown_time):
                dev_pre.append(abs(tv - 1.0))
            else:
                dev_post.append(abs(tv - (1.0 - lim)))
        if dev_pre:
            pre[s] = float(np.median(dev_pre))
        if dev_post:
            post[s] = float(np.median(dev_post))
    return pre, post


def summarize(cfg: ExperimentConfig, records: Sequence[TrialRecord]) -> dict:
    n = cfg.n
    cdf = limit_cdf(cfg.dynamics)
    samples = dropdown_samples(records, n)
    grid = [t / n for t in cfg.grid_times()]
    pre, post = compare_profile(records, cdf, grid, n)
    gaps = [r.local_mixing_time - r.dropdown_time for r in records
            if r.local_mixing_time is not None and r.dropdown_time is not None]
    quant = ({str(q): float(np.quantile(gaps, q)) for q in (0.1, 0.5, 0.9)} if gaps else {})
    a_n = math.ceil(math.log(n) ** 2)
    late = [r for r in records if r.dropdown_time is not None and r.dropdown_time >= (0.5 + 0.05) * n]
    within = [r for r in late if r.local_mixing_time is not None
              and r.local_mixing_time - r.dropdown_time <= a_n]
    sens = {}
    for expo in (-0.25, -0.2, -1.0 / 3.0):
        g = dropdown_gate(n, n ** expo)
        alt = [dropdown_from_membership(r.membership, g) for r in records]
        alt_s = [math.inf if t is None else t / n for t in alt]
        sens[f"{expo:.4f}"] = {
            "ks": ks_distance(alt_s, cdf),
            "ks_gated": ks_distance(alt_s, *gated_cdf(cdf, (math.floor(g) + 1) / n)),
        }
    first_s = (math.floor(dropdown_gate(n, cfg.eps_n)) + 1) / n
    diag = {
        "gate_s": dropdown_gate(n, cfg.eps_n) / n,
        "limit_at_gate": float(cdf(dropdown_gate(n, cfg.eps_n) / n)),
        "ks_vs_gated_limit": ks_distance(samples, *gated_cdf(cdf, first_s)),
        "eps_exponent_sensitivity": sens,
        "local_mixing_window": a_n,
        "late_dropdowns": len(late),
        "late_mixed_within_window": len(within),
    }
    if cfg.dynamics == "deg2":
        ev = sum(r.same_component_events for r in records)
        sp = sum(r.same_component_splits for r in records)
        diag["same_component_events"] = ev
        diag["same_component_split_fraction"] = sp / ev if ev else None
    return {
        "config": asdict(cfg),
        "dropdown_samples": [None if math.isinf(x) else x for x in samples],
        "ks_vs_limit": ks_distance(samples, cdf),
        "profile_deviation_pre": {f"{k:.4f}": v for k, v in pre.items()},
        "profile_deviation_post": {f"{k:.4f}": v for k, v in post.items()},
        "local_mixing_gap_quantiles": quant,
        "diagnostics": diag,
    }


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.9g}"
    return str(x)


def records_to_csv(records: Sequence[TrialRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        for row in r.rows:
            w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def write_outputs(cfg: ExperimentConfig, records: Sequence[TrialRecord], out_dir: str | Path) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "trials.csv").write_text(records_to_csv(records))
    summary = summarize(cfg, records)
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return summary
