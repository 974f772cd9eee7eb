import os
import subprocess
import sys

import numpy as np
import pytest

from sparselad import _kernels
from sparselad._kernels import fallback

try:
    from sparselad._kernels import _fast
except ImportError:
    _fast = None

needs_fast = pytest.mark.skipif(_fast is None, reason="compiled kernels not built")


def test_backend_reported():
    assert _kernels.BACKEND in ("cython", "python")


@needs_fast
def test_backends_agree_on_random_inputs():
    rng = np.random.default_rng(17)
    for trial in range(500):
        n = int(rng.integers(1, 400))
        kind = trial % 4
        if kind == 0:
            x = rng.normal(size=n)
        elif kind == 1:
            x = rng.integers(-3, 4, size=n).astype(float)   # heavy ties
        elif kind == 2:
            x = np.zeros(n)
        else:
            x = np.round(rng.normal(size=n), 1)
        k = int(rng.integers(1, n + 1))
        assert _fast.kth_smallest(x, k) == fallback.kth_smallest(x, k)
        va, ta = _fast.trunc_l1_stats(x, k)
        vb, tb = fallback.trunc_l1_stats(x, k)
        assert ta == tb
        assert va == pytest.approx(vb, rel=1e-12, abs=1e-300)
        s = int(rng.integers(0, n + 1))
        oa, ka = _fast.hard_threshold(x, s)
        ob, kb = fallback.hard_threshold(x, s)
        assert np.array_equal(oa, ob)
        assert np.array_equal(ka, kb)


@needs_fast
def test_backends_agree_on_nonfinite():
    x = np.array([1.0, np.nan, 3.0, np.inf, -2.0, -np.inf, 0.0])
    for s in range(len(x) + 1):
        oa, ka = _fast.hard_threshold(x, s)
        ob, kb = fallback.hard_threshold(x, s)
        assert np.array_equal(oa, ob, equal_nan=True)
        assert np.array_equal(ka, kb)
    for k in range(1, len(x) + 1):
        assert np.array_equal(_fast.kth_smallest(x, k), fallback.kth_smallest(x, k),
                              equal_nan=True)


@needs_fast
def test_kth_smallest_against_full_sort():
    rng = np.random.default_rng(18)
    for _ in range(50):
        x = rng.normal(size=2000)
        k = int(rng.integers(1, 2001))
        assert _fast.kth_smallest(x, k) == np.sort(x)[k - 1]


def test_env_var_forces_python_backend():
    code = ("import sparselad._kernels as K; print(K.BACKEND)")
    env = dict(os.environ, SPARSELAD_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_benchmark_script_importable():
    import importlib.util
    from pathlib import Path
    path = Path(__file__).resolve().parents[1] / "benchmarks" / "kernel_benchmark.py"
    spec = importlib.util.spec_from_file_location("kernel_benchmark", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    rows = mod.bench_kernels(repeats=3)
    assert len(rows) == 3
