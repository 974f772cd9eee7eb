"""Seeded generation of synthetic recovery problems.

A sensing matrix with i.i.d. N(0, 1/m^2) entries, an s-sparse ground truth
(Gaussian nonzeros or a flat all-ones pattern), a sparse outlier vector on
round(p*m) rows (Gaussian or uniform values), and b = A x0 + eta.

Randomness comes from numpy's Philox4x64 counter-based bit generator keyed
directly by the 64-bit seed, so every problem is a pure function of its
spec. Independent per-trial streams are derived with ``trial_seed``, a
splitmix64-style avalanche hash.

Problems round-trip through a binary container (``save_problem`` /
``load_problem``): magic ``SLADPRB1``, a little-endian uint32 JSON-header
length, the JSON header (spec fields plus array sizes and the RNG name),
then raw little-endian float64 payloads A (row-major), x0, eta, b, and the
int64 outlier support T.
"""

import json
from dataclasses import asdict, dataclass

import numpy as np

from .core import as_matrix, as_vector

GAUSSIAN = "gaussian"
FLAT = "flat"
UNIFORM = "uniform"
NONE = "none"

RNG_NAME = "philox4x64-numpy"

PAPER_SCALE = {"m": 1000, "n": 5000}
DESK_SCALE = {"m": 200, "n": 1000}

_MASK64 = (1 << 64) - 1
_MAGIC = b"SLADPRB1"


@dataclass(frozen=True)
class ProblemSpec:
    """Generation parameters. outlier_scale is sigma for Gaussian outliers
    and the half-range u for uniform ones."""

    m: int
    n: int
    s: int
    signal_kind: str = GAUSSIAN
    outlier_kind: str = GAUSSIAN
    outlier_scale: float = 10.0
    p: float = 0.0
    seed: int = 0

    def validate(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("dimensions must be positive")
        if not 0 <= self.s <= self.n:
            raise ValueError(f"sparsity s={self.s} out of range [0, {self.n}]")
        if self.signal_kind not in (GAUSSIAN, FLAT):
            raise ValueError(f"unknown signal kind {self.signal_kind!r}")
        if self.outlier_kind not in (GAUSSIAN, UNIFORM, NONE):
            raise ValueError(f"unknown outlier kind {self.outlier_kind!r}")
        if not 0.0 <= self.p < 1.0:
            raise ValueError(f"outlier fraction p={self.p} out of [0, 1)")
        if self.outlier_kind != NONE and self.p > 0 and self.outlier_scale <= 0:
            raise ValueError("outlier_scale must be positive")

    def outlier_count(self):
        # round to nearest, half away from zero: deterministic and
        # independent of banker's rounding
        return int(np.floor(self.p * self.m + 0.5))


@dataclass
class RecoveryProblem:
    A: np.ndarray
    b: np.ndarray
    x0: np.ndarray
    eta: np.ndarray
    T: np.ndarray
    spec: ProblemSpec


def _mix64(z):
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def trial_seed(base_seed, trial_index):
    """Derive an independent 64-bit stream seed for one trial.

    Injective in trial_index for a fixed base (bijective mixing xor'd into a
    hashed base), so distinct trials never share a stream.
    """
    return _mix64(_mix64(base_seed & _MASK64) ^ (trial_index & _MASK64))


def rng_from_seed(seed):
    return np.random.Generator(np.random.Philox(key=seed & _MASK64))


def generate(spec):
    """Draw the problem determined by ``spec`` (bitwise-reproducible)."""
    spec.validate()
    rng = rng_from_seed(spec.seed)
    m, n, s = spec.m, spec.n, spec.s

    A = rng.standard_normal((m, n)) / m

    sig_support = np.sort(rng.choice(n, size=s, replace=False)).astype(np.int64)
    x0 = np.zeros(n)
    if spec.signal_kind == FLAT:
        x0[sig_support] = 1.0
    else:
        x0[sig_support] = rng.standard_normal(s)

    n_out = spec.outlier_count() if spec.outlier_kind != NONE else 0
    eta = np.zeros(m)
    T = np.sort(rng.choice(m, size=n_out, replace=False)).astype(np.int64) if n_out else \
        np.empty(0, dtype=np.int64)
    if n_out:
        if spec.outlier_kind == GAUSSIAN:
            eta[T] = spec.outlier_scale * rng.standard_normal(n_out)
        else:
            eta[T] = rng.uniform(-spec.outlier_scale, spec.outlier_scale, size=n_out)

    b = A @ x0 + eta
    return RecoveryProblem(A=A, b=b, x0=x0, eta=eta, T=T, spec=spec)


def generate_for_signal(x0, m, outlier_kind, outlier_scale, p, seed):
    """Measurement model around a *given* ground-truth signal (used by the
    image experiments): fresh A and outliers, b = A x0 + eta."""
    x0 = as_vector(x0, name="x0")
    spec = ProblemSpec(m=m, n=x0.size, s=int(np.count_nonzero(x0)),
                       outlier_kind=outlier_kind, outlier_scale=outlier_scale,
                       p=p, seed=seed)
    spec.validate()
    rng = rng_from_seed(seed)
    A = rng.standard_normal((m, x0.size)) / m
    n_out = spec.outlier_count() if outlier_kind != NONE else 0
    eta = np.zeros(m)
    T = np.sort(rng.choice(m, size=n_out, replace=False)).astype(np.int64) if n_out else \
        np.empty(0, dtype=np.int64)
    if n_out:
        if outlier_kind == GAUSSIAN:
            eta[T] = outlier_scale * rng.standard_normal(n_out)
        else:
            eta[T] = rng.uniform(-outlier_scale, outlier_scale, size=n_out)
    return RecoveryProblem(A=A, b=A @ x0 + eta, x0=x0.copy(), eta=eta, T=T, spec=spec)


def save_problem(problem, path):
    """Write the binary container described in the module docstring."""
    spec = problem.spec
    header = {
        "format": "sparselad-problem",
        "version": 1,
        "rng": RNG_NAME,
        "spec": asdict(spec),
        "outlier_count": int(problem.T.size),
        "arrays": ["A", "x0", "eta", "b", "T"],
        "dtype": "<f8/<i8",
    }
    blob = json.dumps(header).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(np.uint32(len(blob)).astype("<u4").tobytes())
        fh.write(blob)
        fh.write(np.ascontiguousarray(problem.A, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(problem.x0, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(problem.eta, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(problem.b, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(problem.T, dtype="<i8").tobytes())


def load_problem(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:8] != _MAGIC:
        raise ValueError(f"{path}: not a sparselad problem container")
    hlen = int(np.frombuffer(raw[8:12], dtype="<u4")[0])
    header = json.loads(raw[12:12 + hlen].decode("utf-8"))
    spec = ProblemSpec(**header["spec"])
    m, n = spec.m, spec.n
    n_out = header["outlier_count"]
    off = 12 + hlen
    expected = off + 8 * (m * n + n + m + m + n_out)
    if len(raw) != expected:
        raise ValueError(f"{path}: payload size {len(raw)} != expected {expected}")

    def take(count, dtype):
        nonlocal off
        arr = np.frombuffer(raw, dtype=dtype, count=count, offset=off).copy()
        off += 8 * count
        return arr

    A = take(m * n, "<f8").reshape(m, n)
    x0 = take(n, "<f8")
    eta = take(m, "<f8")
    b = take(m, "<f8")
    T = take(n_out, "<i8")
    return RecoveryProblem(A=as_matrix(A), b=as_vector(b), x0=as_vector(x0),
                           eta=as_vector(eta), T=T.astype(np.int64), spec=spec)
