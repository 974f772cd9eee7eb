# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled selection kernels (see fallback.py for the reference versions
and the shared contracts).

The quickselect below partially reorders a scratch buffer, never the caller's
data. hard_threshold resolves magnitude ties by lowest index, matching the
stable-argsort rule of the fallback exactly.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, isfinite

from . import fallback as _fallback

cnp.import_array()


cdef bint _all_finite(double[::1] a) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(a.shape[0]):
        if not isfinite(a[i]):
            return False
    return True


cdef double _select_kth(double* a, Py_ssize_t n, Py_ssize_t k) noexcept nogil:
    """k-th smallest (0-based) of a[0..n); reorders a in place."""
    cdef Py_ssize_t lo = 0, hi = n - 1
    cdef Py_ssize_t i, j, mid
    cdef double pivot, t
    while hi > lo:
        if hi - lo < 16:
            for i in range(lo + 1, hi + 1):
                t = a[i]
                j = i
                while j > lo and a[j - 1] > t:
                    a[j] = a[j - 1]
                    j -= 1
                a[j] = t
            break
        mid = lo + ((hi - lo) >> 1)
        if a[mid] < a[lo]:
            t = a[mid]; a[mid] = a[lo]; a[lo] = t
        if a[hi] < a[lo]:
            t = a[hi]; a[hi] = a[lo]; a[lo] = t
        if a[hi] < a[mid]:
            t = a[hi]; a[hi] = a[mid]; a[mid] = t
        pivot = a[mid]
        i = lo
        j = hi
        while i <= j:
            while a[i] < pivot:
                i += 1
            while a[j] > pivot:
                j -= 1
            if i <= j:
                t = a[i]; a[i] = a[j]; a[j] = t
                i += 1
                j -= 1
        # a[lo..j] <= pivot <= a[i..hi]; anything strictly between equals pivot
        if k <= j:
            hi = j
        elif k >= i:
            lo = i
        else:
            return a[k]
    return a[k]


def kth_smallest(double[::1] a, Py_ssize_t k):
    cdef Py_ssize_t n = a.shape[0]
    if not _all_finite(a):
        # non-finite values break the quickselect ordering; match the
        # fallback's (numpy sort) semantics instead
        return _fallback.kth_smallest(np.asarray(a), k)
    scratch_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] scratch = scratch_arr
    cdef Py_ssize_t i
    cdef double out
    with nogil:
        for i in range(n):
            scratch[i] = a[i]
        out = _select_kth(&scratch[0], n, k - 1)
    return out


def trunc_l1_stats(double[::1] r, Py_ssize_t k):
    cdef Py_ssize_t m = r.shape[0]
    if not _all_finite(r):
        return _fallback.trunc_l1_stats(np.asarray(r), k)
    scratch_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] scratch = scratch_arr
    cdef Py_ssize_t i
    cdef double threshold, total = 0.0, v
    with nogil:
        for i in range(m):
            scratch[i] = fabs(r[i])
        threshold = _select_kth(&scratch[0], m, k - 1)
        for i in range(m):
            v = fabs(r[i])
            if v <= threshold:
                total += v
    return total, threshold


def hard_threshold(double[::1] x, Py_ssize_t s):
    cdef Py_ssize_t n = x.shape[0]
    if not _all_finite(x):
        return _fallback.hard_threshold(np.asarray(x), s)
    out_arr = np.zeros(n, dtype=np.float64)
    kept_arr = np.empty(s, dtype=np.int64)
    if s == 0:
        return out_arr, kept_arr
    cdef double[::1] out = out_arr
    cdef cnp.int64_t[::1] kept = kept_arr
    scratch_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] scratch = scratch_arr
    eq_arr = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] eq = eq_arr
    cdef Py_ssize_t i, c1 = 0, neq = 0, quota, ep, w
    cdef double thr, v
    with nogil:
        for i in range(n):
            scratch[i] = fabs(x[i])
        # s-th largest magnitude = (n-s)-th smallest (0-based)
        thr = _select_kth(&scratch[0], n, n - s)
        # Strictly-greater entries are always kept; ties at thr are filled
        # in ascending index order until s slots are used.
        for i in range(n):
            v = fabs(x[i])
            if v > thr:
                c1 += 1
            elif v == thr:
                eq[neq] = i
                neq += 1
        quota = s - c1
        if quota > neq:  # unreachable for finite inputs; guards the writes
            quota = neq
        ep = 0
        w = 0
        for i in range(n):
            if fabs(x[i]) > thr and w < s:
                # merge greater-than entries with the leading `quota` ties,
                # keeping ascending index order
                while ep < quota and eq[ep] < i:
                    kept[w] = eq[ep]
                    w += 1
                    ep += 1
                kept[w] = i
                w += 1
        while ep < quota and w < s:
            kept[w] = eq[ep]
            w += 1
            ep += 1
        for i in range(w):
            out[kept[i]] = x[kept[i]]
    return out_arr, kept_arr[:w]
