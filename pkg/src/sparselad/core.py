"""Dense linear-algebra primitives shared by every solver.

Data conventions used across the package:

* sensing matrix  -- 2-D C-contiguous float64 ndarray of shape (m, n),
* signal / residual vectors -- 1-D float64 ndarrays,
* support sets    -- 1-D int64 ndarrays, strictly increasing, indices valid
                     for the vector they refer to.

All operations are pure functions over their inputs; nothing here keeps
state, so everything is safe to call concurrently.
"""

import numpy as np

from ._kernels import hard_threshold as _ht_kernel


def as_matrix(A):
    """Coerce to a validated (m, n) float64 matrix."""
    A = np.ascontiguousarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError(f"expected a 2-D matrix with positive dimensions, got shape {A.shape}")
    return A


def as_vector(x, length=None, name="vector"):
    """Coerce to a 1-D float64 vector, optionally checking its length."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {x.shape}")
    if length is not None and x.shape[0] != length:
        raise ValueError(f"{name} has length {x.shape[0]}, expected {length}")
    return x


def support(x):
    """Indices of the nonzero entries of x, sorted ascending (int64)."""
    return np.flatnonzero(x).astype(np.int64)


def matvec(A, x):
    """A @ x with an explicit dimension check."""
    A = as_matrix(A)
    x = as_vector(x, length=A.shape[1], name="x")
    return A @ x


def transpose_matvec(A, v):
    """A.T @ v with an explicit dimension check."""
    A = as_matrix(A)
    v = as_vector(v, length=A.shape[0], name="v")
    return A.T @ v


def residual(A, x, b):
    """b - A @ x."""
    A = as_matrix(A)
    x = as_vector(x, length=A.shape[1], name="x")
    b = as_vector(b, length=A.shape[0], name="b")
    return b - A @ x


def sign_vector(v):
    """Elementwise sign with sign(0) = 0."""
    return np.sign(as_vector(v))


def hard_threshold(x, s):
    """Keep the s largest-magnitude entries of x, zero the rest.

    Ties in magnitude are broken deterministically in favour of the lowest
    index. Returns ``(thresholded, support)`` where ``support`` holds the
    indices of the *nonzero* entries of the output -- it can have fewer than
    s elements when kept entries are themselves zero.
    """
    x = as_vector(x, name="x")
    n = x.shape[0]
    if not 0 <= s <= n:
        raise ValueError(f"sparsity s={s} out of range [0, {n}]")
    out, kept = _ht_kernel(x, int(s))
    return out, kept[x[kept] != 0.0]


def restrict_to_support(x, S):
    """Zero x outside the index set S."""
    x = as_vector(x, name="x")
    S = np.asarray(S, dtype=np.int64)
    if S.size and (S.min() < 0 or S.max() >= x.shape[0]):
        raise IndexError(f"support index out of range for vector of length {x.shape[0]}")
    out = np.zeros_like(x)
    out[S] = x[S]
    return out
