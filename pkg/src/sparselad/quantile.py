"""Generalized sample quantile and the quantile-truncated residual l1-norm.

The quantile convention is the inf-form generalized quantile of the empirical
distribution: for a sample of size m and tau in (0, 1) it is the
ceil(tau * m)-th order statistic, with no interpolation. The order index is
computed with a tiny downward nudge before taking the ceiling so that
products like 0.1 * 1000 (= 100.00000000000001 in binary) land on the
mathematically intended integer.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import as_vector

# Absolute slack when deciding whether tau*m is an integer; tau grids in
# practice are coarse decimals, so this only absorbs float representation
# noise, never a real fraction.
_INDEX_NUDGE = 1e-9


@dataclass(frozen=True)
class TruncationResult:
    """Truncated residual l1-norm together with its threshold and mask.

    value:     sum of |r_i| over the retained entries,
    threshold: the tau-quantile of |r|,
    mask:      indices i with |r_i| <= threshold (all ties retained).
    """

    value: float
    threshold: float
    mask: np.ndarray


def order_index(m, tau):
    """1-based order-statistic index: ceil(tau * m), clamped to [1, m]."""
    if m < 1:
        raise ValueError("need at least one sample")
    if not 0.0 < tau < 1.0:
        raise ValueError(f"tau must lie in (0, 1), got {tau}")
    k = math.ceil(tau * m - _INDEX_NUDGE)
    return min(max(k, 1), m)


def empirical_quantile(values, tau):
    """The ceil(tau*m)-th smallest element of ``values``."""
    v = as_vector(values, name="values")
    k = order_index(v.shape[0], tau)
    return _kernels.kth_smallest(v, k)


def truncated_l1(r, tau):
    """Quantile-truncated l1-norm of r, with threshold and retained mask."""
    r = as_vector(r, name="r")
    value, threshold = _kernels.trunc_l1_stats(r, order_index(r.shape[0], tau))
    mask = np.flatnonzero(np.abs(r) <= threshold).astype(np.int64)
    return TruncationResult(value=value, threshold=threshold, mask=mask)


def truncated_l1_value(r, tau):
    """Fast path used by the solvers: returns only (value, threshold)."""
    r = as_vector(r, name="r")
    return _kernels.trunc_l1_stats(r, order_index(r.shape[0], tau))
