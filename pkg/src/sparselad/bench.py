"""Experiment harness: single runs, parameter sweeps, and the image protocol.

A sweep is a grid over outlier fractions p, sparsities s, and solver
parameters (mu, L, tau), each cell evaluated on ``trials`` independent
problems. Within one (p, s, trial) every solver and every (mu, L, tau)
combination sees the *same* problem instance, generated from a seed derived
deterministically from (base_seed, p index, s index, trial) -- so reports are
reproducible regardless of execution order or worker count, and solver
comparisons are paired.

Timing columns are wall-clock and inherently non-deterministic; equality
checks between reports therefore go through ``reports_equal`` which ignores
them by default.
"""

import csv
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import mnistio
from .metrics import SUCCESS_THRESHOLD, evaluate
from .probgen import (GAUSSIAN, NONE, ProblemSpec, generate, generate_for_signal,
                      trial_seed)
from .solvers import SOLVERS, SolverConfig, write_trace_jsonl

PRESETS = {
    "paper": {"m": 1000, "n": 5000, "trials": 100},
    "desk": {"m": 200, "n": 1000, "trials": 20},
}

TRIAL_COLUMNS = ["p", "s", "mu", "L", "tau", "solver", "trial", "seed", "rel_err",
                 "success", "snr_db", "recovered_sparsity", "wall_time_s",
                 "outer_iters", "terminated_by", "error"]
SWEEP_COLUMNS = ["p", "s", "mu", "L", "tau", "solver", "success_rate", "mean_rel_err",
                 "mean_recovered_sparsity", "mean_wall_time_s", "trials", "errors"]

_TIMING_FIELDS = {"wall_time_s", "mean_wall_time_s"}


@dataclass(frozen=True)
class SweepSpec:
    """Sweep definition: a problem template plus parameter grids."""

    m: int
    n: int
    signal_kind: str = GAUSSIAN
    outlier_kind: str = GAUSSIAN
    outlier_scale: float = 10.0
    p_grid: tuple = (0.1,)
    s_grid: tuple = (5,)
    mu_grid: tuple = (6.0,)
    L_grid: tuple = (10,)
    tau_grid: tuple = (0.5,)
    solvers: tuple = ("gfhtp1",)
    trials: int = 20
    base_seed: int = 0
    eps_success: float = SUCCESS_THRESHOLD

    def validate(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for name, grid in [("p_grid", self.p_grid), ("s_grid", self.s_grid),
                           ("mu_grid", self.mu_grid), ("L_grid", self.L_grid),
                           ("tau_grid", self.tau_grid), ("solvers", self.solvers)]:
            if len(grid) == 0:
                raise ValueError(f"{name} must be nonempty")
        for solver in self.solvers:
            if solver not in SOLVERS:
                raise ValueError(f"unknown solver {solver!r} (have {sorted(SOLVERS)})")
        for p in self.p_grid:
            for s in self.s_grid:
                ProblemSpec(m=self.m, n=self.n, s=s, signal_kind=self.signal_kind,
                            outlier_kind=self.outlier_kind if p > 0 else NONE,
                            outlier_scale=self.outlier_scale, p=p, seed=0).validate()


@dataclass
class TrialRow:
    p: float
    s: int
    mu: float
    L: int
    tau: float
    solver: str
    trial: int
    seed: int
    rel_err: float
    success: bool
    snr_db: float
    recovered_sparsity: int
    wall_time_s: float
    outer_iters: int
    terminated_by: str
    error: str = ""


@dataclass
class SweepRow:
    p: float
    s: int
    mu: float
    L: int
    tau: float
    solver: str
    success_rate: float
    mean_rel_err: float
    mean_recovered_sparsity: float
    mean_wall_time_s: float
    trials: int
    errors: int


@dataclass
class SweepReport:
    spec: SweepSpec
    rows: list = field(default_factory=list)
    trial_rows: list = field(default_factory=list)


def problem_seed_for(spec, p_idx, s_idx, trial):
    """Seed of the problem shared by all solvers in one (p, s, trial) cell."""
    gen_index = (p_idx * len(spec.s_grid) + s_idx) * spec.trials + trial
    return trial_seed(spec.base_seed, gen_index)


def _cell_problem(spec, p_idx, s_idx, trial):
    p = spec.p_grid[p_idx]
    pspec = ProblemSpec(m=spec.m, n=spec.n, s=spec.s_grid[s_idx],
                        signal_kind=spec.signal_kind,
                        outlier_kind=spec.outlier_kind if p > 0 else NONE,
                        outlier_scale=spec.outlier_scale, p=p,
                        seed=problem_seed_for(spec, p_idx, s_idx, trial))
    return generate(pspec)


def _run_cell_trial(spec, p_idx, s_idx, trial):
    """All trial rows for one generated problem (every solver/param combo)."""
    p, s = spec.p_grid[p_idx], spec.s_grid[s_idx]
    try:
        problem = _cell_problem(spec, p_idx, s_idx, trial)
    except Exception as exc:  # generation failure: error rows, sweep continues
        msg = f"{type(exc).__name__}: {exc}"
        seed = problem_seed_for(spec, p_idx, s_idx, trial)
        return [TrialRow(p=p, s=s, mu=mu, L=L, tau=tau, solver=solver, trial=trial,
                         seed=seed, rel_err=math.nan, success=False, snr_db=math.nan,
                         recovered_sparsity=0, wall_time_s=0.0, outer_iters=0,
                         terminated_by="error", error=msg)
                for mu in spec.mu_grid for L in spec.L_grid
                for tau in spec.tau_grid for solver in spec.solvers]
    rows = []
    for mu in spec.mu_grid:
        for L in spec.L_grid:
            for tau in spec.tau_grid:
                for solver in spec.solvers:
                    cfg = SolverConfig(mu=mu, tau=tau, inner_budget=L, sparsity=s)
                    common = dict(p=p, s=s, mu=mu, L=L, tau=tau, solver=solver,
                                  trial=trial, seed=problem.spec.seed)
                    start = time.perf_counter()
                    try:
                        result = SOLVERS[solver](problem.A, problem.b, cfg)
                    except Exception as exc:  # recorded, sweep continues
                        rows.append(TrialRow(**common, rel_err=math.nan, success=False,
                                             snr_db=math.nan, recovered_sparsity=0,
                                             wall_time_s=time.perf_counter() - start,
                                             outer_iters=0, terminated_by="error",
                                             error=f"{type(exc).__name__}: {exc}"))
                        continue
                    elapsed = time.perf_counter() - start
                    outcome = evaluate(result.x_hat, problem.x0, solver,
                                       wall_time_s=elapsed, eps_success=spec.eps_success)
                    rows.append(TrialRow(**common, rel_err=outcome.rel_err,
                                         success=outcome.success, snr_db=outcome.snr_db,
                                         recovered_sparsity=int(np.count_nonzero(result.x_hat)),
                                         wall_time_s=elapsed, outer_iters=result.outer_iters,
                                         terminated_by=result.terminated_by))
    return rows


def aggregate_trial_rows(trial_rows):
    """Deterministic (cell, solver) aggregation of per-trial rows."""
    groups = {}
    for row in trial_rows:
        groups.setdefault((row.p, row.s, row.mu, row.L, row.tau, row.solver), []).append(row)
    out = []
    for key in sorted(groups, key=lambda k: (k[0], k[1], k[2], k[3], k[4], k[5])):
        rows = sorted(groups[key], key=lambda r: r.trial)
        ok = [r for r in rows if not r.error]
        n_ok = len(ok)
        out.append(SweepRow(
            p=key[0], s=key[1], mu=key[2], L=key[3], tau=key[4], solver=key[5],
            success_rate=sum(r.success for r in ok) / n_ok if n_ok else math.nan,
            mean_rel_err=sum(r.rel_err for r in ok) / n_ok if n_ok else math.nan,
            mean_recovered_sparsity=sum(r.recovered_sparsity for r in ok) / n_ok if n_ok else math.nan,
            mean_wall_time_s=sum(r.wall_time_s for r in ok) / n_ok if n_ok else math.nan,
            trials=len(rows), errors=len(rows) - n_ok))
    return out


def run_sweep(spec, workers=1):
    """Run the sweep; ``workers`` > 1 parallelizes over (p, s, trial) tasks
    with a deterministic reduction, yielding the same report as serial."""
    spec.validate()
    tasks = [(p_idx, s_idx, trial)
             for p_idx in range(len(spec.p_grid))
             for s_idx in range(len(spec.s_grid))
             for trial in range(spec.trials)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_task = list(pool.map(lambda t: _run_cell_trial(spec, *t), tasks))
    else:
        per_task = [_run_cell_trial(spec, *t) for t in tasks]
    trial_rows = [row for rows in per_task for row in rows]
    return SweepReport(spec=spec, rows=aggregate_trial_rows(trial_rows),
                       trial_rows=trial_rows)


def reports_equal(a, b, ignore_timing=True):
    """Structural equality of two sweep reports; timing columns are ignored
    unless ignore_timing=False (wall-clock is never reproducible)."""
    def strip(rows):
        out = []
        for r in rows:
            d = dict(r.__dict__)
            if ignore_timing:
                for f in _TIMING_FIELDS:
                    d.pop(f, None)
            out.append(d)
        return out

    def eq(x, y):
        if isinstance(x, float) and isinstance(y, float):
            return (math.isnan(x) and math.isnan(y)) or x == y
        return x == y

    if len(a.rows) != len(b.rows) or len(a.trial_rows) != len(b.trial_rows):
        return False
    for ra, rb in zip(strip(a.rows) + strip(a.trial_rows),
                      strip(b.rows) + strip(b.trial_rows)):
        if ra.keys() != rb.keys() or any(not eq(ra[k], rb[k]) for k in ra):
            return False
    return True


def _write_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for r in rows:
            w.writerow([getattr(r, c) for c in columns])


def write_trials_csv(report, path):
    _write_csv(path, TRIAL_COLUMNS, report.trial_rows)


def write_sweep_csv(report, path):
    _write_csv(path, SWEEP_COLUMNS, report.rows)


def read_trials_csv(path):
    """Read back a per-trial CSV (str(float) columns round-trip exactly)."""
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            rows.append(TrialRow(
                p=float(rec["p"]), s=int(rec["s"]), mu=float(rec["mu"]),
                L=int(rec["L"]), tau=float(rec["tau"]), solver=rec["solver"],
                trial=int(rec["trial"]), seed=int(rec["seed"]),
                rel_err=float(rec["rel_err"]), success=rec["success"] == "True",
                snr_db=float(rec["snr_db"]),
                recovered_sparsity=int(rec["recovered_sparsity"]),
                wall_time_s=float(rec["wall_time_s"]),
                outer_iters=int(rec["outer_iters"]),
                terminated_by=rec["terminated_by"], error=rec["error"]))
    return rows


def run_single(problem, solver_name, cfg=None, trace_path=None):
    """Solve one problem; returns (SolverResult, TrialOutcome) and optionally
    writes the outer-iteration trace as JSON lines."""
    if solver_name not in SOLVERS:
        raise ValueError(f"unknown solver {solver_name!r}")
    cfg = cfg if cfg is not None else SolverConfig(sparsity=problem.spec.s)
    start = time.perf_counter()
    result = SOLVERS[solver_name](problem.A, problem.b, cfg)
    elapsed = time.perf_counter() - start
    outcome = evaluate(result.x_hat, problem.x0, solver_name, wall_time_s=elapsed)
    if trace_path is not None:
        write_trace_jsonl(result, trace_path)
    return result, outcome


@dataclass
class MnistRow:
    image_index: int
    s: int
    matrix_seed: int
    solver: str
    snr_db: float
    rel_err: float
    wall_time_s: float
    outer_iters: int


MNIST_COLUMNS = ["image_index", "s", "matrix_seed", "solver", "snr_db", "rel_err",
                 "wall_time_s", "outer_iters"]


def run_mnist(images, image_indices, m, p, sigma, solver_names, cfg=None, seed=0):
    """Recover vectorized images from corrupted random measurements.

    ``images`` is an IdxImages or a path to an IDX file. A fresh sensing
    matrix is drawn per image from a seed derived from (seed, image index),
    recorded in the report rows.
    """
    if not isinstance(images, mnistio.IdxImages):
        images = mnistio.load_idx_images(images)
    for solver in solver_names:
        if solver not in SOLVERS:
            raise ValueError(f"unknown solver {solver!r}")
    rows = []
    for idx in image_indices:
        signal, s = mnistio.image_to_signal(images.image(idx))
        if s == 0:
            raise ValueError(f"image {idx} is all-zero: ground truth has no signal")
        matrix_seed = trial_seed(seed, idx)
        problem = generate_for_signal(signal, m=m,
                                      outlier_kind=GAUSSIAN if p > 0 else NONE,
                                      outlier_scale=sigma, p=p, seed=matrix_seed)
        for solver in solver_names:
            run_cfg = replace(cfg, sparsity=s) if cfg is not None else SolverConfig(sparsity=s)
            start = time.perf_counter()
            result = SOLVERS[solver](problem.A, problem.b, run_cfg)
            elapsed = time.perf_counter() - start
            outcome = evaluate(result.x_hat, problem.x0, solver, wall_time_s=elapsed)
            rows.append(MnistRow(image_index=idx, s=s, matrix_seed=matrix_seed,
                                 solver=solver, snr_db=outcome.snr_db,
                                 rel_err=outcome.rel_err, wall_time_s=elapsed,
                                 outer_iters=result.outer_iters))
    return rows


def write_mnist_csv(rows, path):
    _write_csv(path, MNIST_COLUMNS, rows)
