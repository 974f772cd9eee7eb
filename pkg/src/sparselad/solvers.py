"""Iterative solvers for sparsity-constrained least absolute deviations.

Two pursuit solvers share one engine:

* ``solve_fhtp1``  -- fixed sparsity s: each outer iteration hard-thresholds
  a subgradient step to s entries, then refines on that support with up to L
  inner subgradient steps. Stops on the truncated-residual test, on a
  repeated support, or at the outer-iteration cap.
* ``solve_gfhtp1`` -- graded: outer iteration k keeps k+1 entries instead of
  s, so no sparsity estimate is needed; the support-repeat stop is dropped.

Every subgradient step uses the truncated adaptive step size
``mu * sqrt(pi/2) * truncated_l1(b - A u, tau)``: the residual entries above
the tau-quantile in magnitude (the ones most likely hit by outliers) do not
contribute to the step length, which is what makes the iteration robust to
gross corruptions.

Two baselines are included for comparison: ``solve_aiht`` (adaptive-step IHT
driven by the *untruncated* residual l1-norm) and ``solve_psgd`` (projected
subgradient descent with the decaying schedule 0.8 * 0.95^k). Both stop when
the relative iterate change drops to 1e-8 or after 1000 iterations.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import as_matrix, as_vector, hard_threshold, support
from .quantile import truncated_l1_value
from .stepsize import SQRT_PI_OVER_2

OUTER_TOLERANCE = "outer_tolerance"
SUPPORT_REPEAT = "support_repeat"
MAX_ITERATIONS = "max_iterations"
# Overflow guard: a solve whose iterates leave the representable range (the
# AIHT baseline genuinely diverges under outliers) stops and returns its last
# finite iterate, so failures stay measurable instead of becoming NaN.
DIVERGED = "diverged"

# Stop rule for the AIHT / PSGD baselines.
BASELINE_REL_TOL = 1e-8
BASELINE_MAX_ITERS = 1000

PSGD_STEP0 = 0.8
PSGD_DECAY = 0.95


@dataclass
class SolverConfig:
    """Shared solver configuration.

    sparsity is required by fhtp1/aiht/psgd and ignored by gfhtp1. max_outer
    defaults to ceil(m/2) when left as None. mu_schedule, when given, is a
    callable (k, l) -> mu overriding the constant mu per subgradient step
    (l = 0 is the support-selection step).
    """

    mu: float = 6.0
    tau: float = 0.5
    inner_budget: int = 10
    max_outer: int | None = None
    eps_inner: float = 1e-8
    eps_outer: float = 1e-4
    sparsity: int | None = None
    x0: np.ndarray | None = None
    mu_schedule: object = None

    def validate(self):
        if self.mu <= 0:
            raise ValueError("mu must be positive")
        if not 0.0 < self.tau < 1.0:
            raise ValueError(f"tau must lie in (0, 1), got {self.tau}")
        if self.inner_budget < 1:
            raise ValueError("inner_budget must be >= 1")
        if self.max_outer is not None and self.max_outer < 1:
            raise ValueError("max_outer must be >= 1")
        if self.eps_inner <= 0 or self.eps_outer <= 0:
            raise ValueError("tolerances must be positive")

    def resolved_max_outer(self, m):
        return self.max_outer if self.max_outer is not None else math.ceil(m / 2)

    def mu_at(self, k, l):
        if self.mu_schedule is not None:
            return float(self.mu_schedule(k, l))
        return self.mu


@dataclass
class OuterTraceEntry:
    """One outer iteration: support chosen, residual statistic that drove the
    first step, the step itself, and how many inner refinements ran."""

    k: int
    support: np.ndarray
    truncated_residual_l1: float
    step_t0: float
    inner_iters_used: int


@dataclass
class SolverResult:
    x_hat: np.ndarray
    terminated_by: str
    outer_iters: int
    trace: list = field(default_factory=list)


def _finite(v):
    return bool(np.isfinite(v).all())


def _initial_x(cfg, n):
    if cfg.x0 is None:
        return np.zeros(n)
    x0 = as_vector(cfg.x0, length=n, name="x0").copy()
    if not _finite(x0):
        raise ValueError("x0 must be finite")
    return x0


def _require_sparsity(cfg, n, solver):
    if cfg.sparsity is None:
        raise ValueError(f"{solver} requires cfg.sparsity")
    s = int(cfg.sparsity)
    if not 1 <= s <= n:
        raise ValueError(f"sparsity s={s} out of range [1, {n}]")
    return s


def _rel_change(new, old):
    diff = float(np.linalg.norm(new - old))
    denom = float(np.linalg.norm(old))
    # relative change is undefined at ||old|| = 0; use the absolute change
    return diff if denom == 0.0 else diff / denom


def _solve_pursuit(A, b, cfg, graded):
    A = as_matrix(A)
    m, n = A.shape
    b = as_vector(b, length=m, name="b")
    cfg.validate()
    s = None if graded else _require_sparsity(cfg, n, "fhtp1")

    x = _initial_x(cfg, n)
    S_curr = support(x)  # S^k, initially S^0 = supp(x^0)
    S_prev = None        # S^{k-1}; undefined at k = 0
    max_outer = cfg.resolved_max_outer(m)
    trace = []
    terminated = MAX_ITERATIONS

    k = 0
    while True:
        if k >= max_outer:
            terminated = MAX_ITERATIONS
            break
        if not graded and S_prev is not None and np.array_equal(S_curr, S_prev):
            terminated = SUPPORT_REPEAT
            break
        r = b - A @ x
        trunc_val, _ = truncated_l1_value(r, cfg.tau)
        if trunc_val <= cfg.eps_outer:
            terminated = OUTER_TOLERANCE
            break

        t0 = cfg.mu_at(k, 0) * SQRT_PI_OVER_2 * trunc_val
        keep = k + 1 if graded else s
        u, S_new = hard_threshold(x + t0 * (A.T @ np.sign(r)), min(keep, n))
        if not _finite(u):
            terminated = DIVERGED
            break

        # inner refinement on the frozen support S^{k+1}
        u_prev = x
        inner_used = 0
        diverged = False
        for l in range(1, cfg.inner_budget + 1):
            if _rel_change(u, u_prev) <= cfg.eps_inner:
                break
            r_in = b - A @ u
            val_in, _ = truncated_l1_value(r_in, cfg.tau)
            t_l = cfg.mu_at(k, l) * SQRT_PI_OVER_2 * val_in
            step = u + t_l * (A.T @ np.sign(r_in))
            u_next = np.zeros(n)
            u_next[S_new] = step[S_new]
            if not _finite(u_next):
                diverged = True
                break
            u_prev, u = u, u_next
            inner_used += 1

        trace.append(OuterTraceEntry(k=k, support=S_new, truncated_residual_l1=trunc_val,
                                     step_t0=t0, inner_iters_used=inner_used))
        x = u
        S_prev, S_curr = S_curr, S_new
        k += 1
        if diverged:
            terminated = DIVERGED
            break

    return SolverResult(x_hat=x, terminated_by=terminated, outer_iters=k, trace=trace)


def solve_fhtp1(A, b, cfg):
    """Fast hard-thresholding pursuit for the LAD objective (known sparsity)."""
    return _solve_pursuit(A, b, cfg, graded=False)


def solve_gfhtp1(A, b, cfg):
    """Graded fast hard-thresholding pursuit (sparsity-free)."""
    return _solve_pursuit(A, b, cfg, graded=True)


def _solve_threshold_descent(A, b, cfg, solver, step_fn):
    """Shared loop of the AIHT / PSGD baselines.

    step_fn(k, r_l1) -> step length; the iterate is hard-thresholded to s
    entries every iteration.
    """
    A = as_matrix(A)
    m, n = A.shape
    b = as_vector(b, length=m, name="b")
    cfg.validate()
    s = _require_sparsity(cfg, n, solver)

    x = _initial_x(cfg, n)
    trace = []
    terminated = MAX_ITERATIONS
    iters = BASELINE_MAX_ITERS
    for k in range(BASELINE_MAX_ITERS):
        r = b - A @ x
        r_l1 = float(np.abs(r).sum())
        t = step_fn(k, r_l1)
        x_new, S = hard_threshold(x + t * (A.T @ np.sign(r)), s)
        if not _finite(x_new):
            terminated = DIVERGED
            iters = k
            break
        trace.append(OuterTraceEntry(k=k, support=S, truncated_residual_l1=r_l1,
                                     step_t0=t, inner_iters_used=0))
        done = _rel_change(x_new, x) <= BASELINE_REL_TOL
        x = x_new
        if done:
            terminated = OUTER_TOLERANCE
            iters = k + 1
            break
    return SolverResult(x_hat=x, terminated_by=terminated, outer_iters=iters, trace=trace)


def solve_aiht(A, b, cfg):
    """Adaptive-step iterative hard thresholding baseline.

    Step t_k = mu * sqrt(pi/2) * ||b - A x^k||_1 -- the *full* residual
    l1-norm, so outliers inflate the step; this baseline is expected to fail
    under gross corruptions.
    """
    return _solve_threshold_descent(
        A, b, cfg, "aiht", lambda k, r_l1: cfg.mu_at(k, 0) * SQRT_PI_OVER_2 * r_l1)


def solve_psgd(A, b, cfg):
    """Projected subgradient descent baseline, step 0.8 * 0.95^k.

    The reference formulation leaves the projection placement open; here the
    hard-thresholding projection is applied at every iteration. Trace entries
    record step_t0 = mu_k (schedule value) and the full residual l1-norm.
    """
    return _solve_threshold_descent(
        A, b, cfg, "psgd", lambda k, r_l1: PSGD_STEP0 * PSGD_DECAY ** k)


SOLVERS = {
    "fhtp1": solve_fhtp1,
    "gfhtp1": solve_gfhtp1,
    "aiht": solve_aiht,
    "psgd": solve_psgd,
}


def trace_jsonl_lines(result):
    """Trace as JSON-lines strings (one object per outer iteration)."""
    for e in result.trace:
        yield json.dumps({
            "k": e.k,
            "support": [int(i) for i in e.support],
            "trunc_res_l1": e.truncated_residual_l1,
            "step_t0": e.step_t0,
            "inner_iters": e.inner_iters_used,
        })


def write_trace_jsonl(result, path):
    with open(path, "w") as fh:
        for line in trace_jsonl_lines(result):
            fh.write(line + "\n")
