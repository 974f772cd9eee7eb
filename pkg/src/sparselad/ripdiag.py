"""Monte-Carlo estimation of the restricted 1-isometry constant.

For s-sparse unit vectors x the scaled residual map should satisfy
(1 - delta_s) <= sqrt(pi/2) ||A x||_1 <= (1 + delta_s). Sampling random
s-sparse directions and taking the largest deviation |sqrt(pi/2)||Ax||_1 - 1|
yields a certified *lower* bound on delta_s -- never an upper bound;
certifying upper bounds is NP-hard and out of scope here.

Each sample's direction comes from its own derived seed, so the estimate for
(seed, samples) is reproducible, grows monotonically in ``samples`` (max over
a nested sample set), and can be evaluated in chunks of any size without
changing the result.
"""

from dataclasses import dataclass

import numpy as np

from .core import as_matrix
from .probgen import rng_from_seed, trial_seed
from .stepsize import SQRT_PI_OVER_2

GAUSSIAN_DIRECTIONS = "gaussian"
VERTEX_DIRECTIONS = "vertex"  # entries +-1/sqrt(s)


@dataclass
class RicEstimate:
    s: int
    delta_hat: float
    samples: int
    worst_support: np.ndarray
    worst_direction: np.ndarray


def deviation(A, support, direction):
    """|sqrt(pi/2) ||A x||_1 / ||x||_2 - 1| for the s-sparse x described by
    (support, direction on support)."""
    Ax = A[:, support] @ direction
    norm = float(np.linalg.norm(direction))
    return abs(SQRT_PI_OVER_2 * float(np.abs(Ax).sum()) / norm - 1.0)


def _draw_sample(n, s, mode, sample_seed):
    rng = rng_from_seed(sample_seed)
    sup = np.sort(rng.choice(n, size=s, replace=False)).astype(np.int64)
    if mode == VERTEX_DIRECTIONS:
        d = rng.choice((-1.0, 1.0), size=s) / np.sqrt(s)
    else:
        d = rng.standard_normal(s)
        d /= np.linalg.norm(d)
    return sup, d


def estimate_ric1(A, s, samples, seed, mode=GAUSSIAN_DIRECTIONS, chunk=512):
    """Max deviation over ``samples`` random s-sparse unit vectors."""
    A = as_matrix(A)
    n = A.shape[1]
    if not 1 <= s <= n:
        raise ValueError(f"order s={s} out of range [1, {n}]")
    if samples < 1:
        raise ValueError("need at least one sample")
    if mode not in (GAUSSIAN_DIRECTIONS, VERTEX_DIRECTIONS):
        raise ValueError(f"unknown direction mode {mode!r}")

    best = -1.0
    worst_support = worst_direction = None
    for start in range(0, samples, chunk):
        count = min(chunk, samples - start)
        supports = np.empty((count, s), dtype=np.int64)
        dirs = np.empty((count, s))
        for i in range(count):
            supports[i], dirs[i] = _draw_sample(n, s, mode, trial_seed(seed, start + i))
        # gather columns per sample: (m, count, s) einsum against (count, s)
        cols = A[:, supports]
        Ax = np.einsum("mcs,cs->mc", cols, dirs)
        devs = np.abs(SQRT_PI_OVER_2 * np.abs(Ax).sum(axis=0) - 1.0)
        i = int(np.argmax(devs))
        if devs[i] > best:
            best = float(devs[i])
            worst_support = supports[i].copy()
            worst_direction = dirs[i].copy()

    return RicEstimate(s=s, delta_hat=best, samples=samples,
                       worst_support=worst_support, worst_direction=worst_direction)


def enumerate_ric1_order1(A):
    """Exact delta_1 over the columns: max_j |sqrt(pi/2) ||a_j||_1 / 1 - 1|
    (order-1 sparse vectors are +-e_j, so enumeration is exact)."""
    A = as_matrix(A)
    devs = np.abs(SQRT_PI_OVER_2 * np.abs(A).sum(axis=0) - 1.0)
    j = int(np.argmax(devs))
    return float(devs[j]), j
