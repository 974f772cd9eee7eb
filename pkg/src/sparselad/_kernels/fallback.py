"""Pure-numpy kernels: the reference implementations of the selection
primitives that the optional compiled module (`_fast`) accelerates.

Both backends implement the same contracts:

* ``kth_smallest(a, k)``       -- k-th smallest element (k is 1-based),
* ``trunc_l1_stats(r, k)``     -- (sum of |r_i| over |r_i| <= thr, thr) where
                                  thr is the k-th smallest of |r|,
* ``hard_threshold(x, s)``     -- keep the s largest-magnitude entries
                                  (ties -> lowest index), zero the rest;
                                  returns (thresholded copy, kept indices).

Inputs are assumed validated by the callers (contiguous 1-D float64, k in
[1, len], 0 <= s <= len).
"""

import numpy as np


def kth_smallest(a, k):
    return float(np.partition(a, k - 1)[k - 1])


def trunc_l1_stats(r, k):
    mag = np.abs(r)
    threshold = float(np.partition(mag, k - 1)[k - 1])
    value = float(mag[mag <= threshold].sum())
    return value, threshold


def hard_threshold(x, s):
    out = np.zeros_like(x)
    if s == 0:
        return out, np.empty(0, dtype=np.int64)
    # Stable sort on descending magnitude: equal magnitudes keep their
    # original (ascending index) order, which is exactly the tie rule.
    order = np.argsort(-np.abs(x), kind="stable")
    kept = np.sort(order[:s]).astype(np.int64)
    out[kept] = x[kept]
    return out, kept
