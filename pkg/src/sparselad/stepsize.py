"""Adaptive step size, standard-normal inverse CDF, and the feasible range
of the step-size coefficient mu implied by the convergence conditions.

The feasibility check solves the quadratic inequality a*mu^2 - b*mu + c0 < 0
whose coefficients depend on the truncation quantile tau, the outlier
fraction p, a quantile-concentration slack epsilon, the restricted
1-isometry constant delta, the retained-outlier ratio t1_ratio, and (for the
flat-signal variant) the flatness ratio lambda:

    z  = ninv((1 + tau + p) / 2) + epsilon
    c  = (2 - 2p)(1 - delta) - (1 + delta)
    b  = 2c * sqrt(2/pi) * (tau - t1_ratio) * (1 - delta)

    general: a = tau^2 z^2 (1 + delta)^2,      c0 = 2/3
    flat:    a = 2 tau^2 z^2 (1 + delta)^2,    c0 = 1 - 1/(2 + lambda^2)

When the discriminant b^2 - 4*a*c0 is positive (and b > 0) the open interval
between the two roots is the feasible mu range; otherwise no mu satisfies
the condition. This calculator is a planning/diagnostic tool -- the solvers
take mu directly (default 6, which works well empirically even outside the
proven interval).
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .quantile import truncated_l1_value

SQRT_PI_OVER_2 = math.sqrt(math.pi / 2.0)
SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)

GENERAL = "general"
FLAT = "flat"

# Peter Acklam's rational approximation to the inverse normal CDF
# (relative error < 1.15e-9 over (0,1)), refined below by one Halley step.
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


def normal_cdf(z):
    """Standard normal CDF."""
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def normal_inverse_cdf(q):
    """Standard normal quantile function, accurate to ~1e-15.

    Rational minimax approximation plus one Halley refinement against the
    erfc-based CDF; absolute error is far below the 1e-7 contract.
    """
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    if q < _P_LOW:
        u = math.sqrt(-2.0 * math.log(q))
        x = (((((_C[0] * u + _C[1]) * u + _C[2]) * u + _C[3]) * u + _C[4]) * u + _C[5]) / \
            ((((_D[0] * u + _D[1]) * u + _D[2]) * u + _D[3]) * u + 1.0)
    elif q <= 1.0 - _P_LOW:
        u = q - 0.5
        t = u * u
        x = (((((_A[0] * t + _A[1]) * t + _A[2]) * t + _A[3]) * t + _A[4]) * t + _A[5]) * u / \
            (((((_B[0] * t + _B[1]) * t + _B[2]) * t + _B[3]) * t + _B[4]) * t + 1.0)
    else:
        u = math.sqrt(-2.0 * math.log(1.0 - q))
        x = -(((((_C[0] * u + _C[1]) * u + _C[2]) * u + _C[3]) * u + _C[4]) * u + _C[5]) / \
            ((((_D[0] * u + _D[1]) * u + _D[2]) * u + _D[3]) * u + 1.0)
    # one Halley step on Phi(x) - q
    e = normal_cdf(x) - q
    u = e * math.sqrt(2.0 * math.pi) * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


def adaptive_step(r, tau, mu):
    """Truncated adaptive step: mu * sqrt(pi/2) * truncated l1 of r."""
    if mu <= 0:
        raise ValueError(f"mu must be positive, got {mu}")
    value, _ = truncated_l1_value(r, tau)
    return mu * SQRT_PI_OVER_2 * value


@dataclass(frozen=True)
class MuInterval:
    """Open feasible interval (lo, hi) for mu, or empty when infeasible."""

    lo: float
    hi: float
    feasible: bool

    @classmethod
    def empty(cls):
        return cls(lo=math.nan, hi=math.nan, feasible=False)

    def contains(self, mu):
        return self.feasible and self.lo < mu < self.hi


@dataclass(frozen=True)
class FeasibilityParams:
    """Inputs of the mu-feasibility quadratic (see module docstring).

    delta is the restricted 1-isometry constant of the relevant order; it is
    unobservable in practice, so it is a user-set planning value. t1_ratio is
    the fraction of retained residual entries hit by outliers, frozen as an
    input scalar (0.001 is the standard planning value).
    """

    tau: float
    p: float
    epsilon: float = 1e-3
    delta: float = 0.01
    t1_ratio: float = 1e-3
    lam: float = 1.0
    variant: str = GENERAL

    def validate(self):
        if self.variant not in (GENERAL, FLAT):
            raise ValueError(f"unknown variant {self.variant!r}")
        if not 0.0 < self.tau < 1.0:
            raise ValueError(f"tau must lie in (0, 1), got {self.tau}")
        if not 0.0 <= self.p < 0.5:
            raise ValueError(f"p must lie in [0, 0.5), got {self.p}")
        if self.tau + self.p >= 1.0:
            raise ValueError(f"need tau + p < 1, got tau={self.tau}, p={self.p}")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if not 0.0 < self.delta < 0.25:
            raise ValueError(f"delta must lie in (0, 0.25), got {self.delta}")
        if self.p >= 0.5 - self.delta / (1.0 - self.delta):
            raise ValueError(f"need p < 1/2 - delta/(1-delta), got p={self.p}, delta={self.delta}")
        if self.t1_ratio < 0:
            raise ValueError("t1_ratio must be nonnegative")
        if self.variant == FLAT and self.lam < 1.0:
            raise ValueError(f"lambda must be >= 1, got {self.lam}")

    def in_quantile_window(self):
        """Whether (tau, p) lies in the quantile-robustness window
        p < tau < 1 - p. Advisory only: the reference feasibility points
        themselves evaluate the quadratic outside it (e.g. tau=0.1, p=0.2),
        so this is reported but never enforced."""
        return self.p < self.tau < 1.0 - self.p

    def admissible(self):
        try:
            self.validate()
        except ValueError:
            return False
        return True


def quadratic_coefficients(params):
    """(a, b, c0) of the feasibility quadratic a*mu^2 - b*mu + c0 < 0."""
    params.validate()
    z = normal_inverse_cdf((1.0 + params.tau + params.p) / 2.0) + params.epsilon
    d = params.delta
    c = (2.0 - 2.0 * params.p) * (1.0 - d) - (1.0 + d)
    a = (params.tau * z * (1.0 + d)) ** 2
    b = 2.0 * c * SQRT_2_OVER_PI * (params.tau - params.t1_ratio) * (1.0 - d)
    if params.variant == FLAT:
        a *= 2.0
        c0 = 1.0 - 1.0 / (2.0 + params.lam ** 2)
    else:
        c0 = 2.0 / 3.0
    return a, b, c0


def feasible_mu_range(params):
    """Open interval of mu satisfying the convergence condition, or empty."""
    a, b, c0 = quadratic_coefficients(params)
    disc = b * b - 4.0 * a * c0
    if disc <= 0.0 or b <= 0.0:
        return MuInterval.empty()
    root = math.sqrt(disc)
    return MuInterval(lo=(b - root) / (2.0 * a), hi=(b + root) / (2.0 * a), feasible=True)


@dataclass(frozen=True)
class GridCell:
    tau: float
    p: float
    feasible: bool
    mu_lo: float
    mu_hi: float


@dataclass
class MaxPGrid:
    """Full feasibility grid plus, per tau, the largest feasible p."""

    variant: str
    cells: list = field(default_factory=list)
    max_p: dict = field(default_factory=dict)

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["tau", "p", "feasible", "mu_lo", "mu_hi"])
            for c in self.cells:
                w.writerow([
                    f"{c.tau:.6g}", f"{c.p:.6g}", int(c.feasible),
                    "" if not c.feasible else f"{c.mu_lo:.6f}",
                    "" if not c.feasible else f"{c.mu_hi:.6f}",
                ])


def max_p_grid(tau_grid, p_grid, epsilon=1e-3, delta=0.01, t1_ratio=1e-3,
               lam=1.0, variant=GENERAL):
    """Evaluate feasibility over a (tau, p) grid.

    Parameter combinations outside the admissible window (p >= min(tau,
    1-tau), delta/p hypothesis violations) are reported as infeasible cells
    rather than errors, so the grid can cover the full rectangle.
    """
    out = MaxPGrid(variant=variant)
    for tau in tau_grid:
        best = None
        for p in p_grid:
            params = FeasibilityParams(tau=tau, p=p, epsilon=epsilon, delta=delta,
                                       t1_ratio=t1_ratio, lam=lam, variant=variant)
            if params.admissible():
                interval = feasible_mu_range(params)
            else:
                interval = MuInterval.empty()
            out.cells.append(GridCell(tau=tau, p=p, feasible=interval.feasible,
                                      mu_lo=interval.lo, mu_hi=interval.hi))
            if interval.feasible and (best is None or p > best):
                best = p
        out.max_p[tau] = best
    return out


def grid_as_arrays(grid, tau_grid, p_grid):
    """Boolean feasibility matrix (len(tau) x len(p)) for plotting."""
    mat = np.zeros((len(tau_grid), len(p_grid)), dtype=bool)
    cells = iter(grid.cells)
    for i in range(len(tau_grid)):
        for j in range(len(p_grid)):
            mat[i, j] = next(cells).feasible
    return mat
