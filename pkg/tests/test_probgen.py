import numpy as np
import pytest

from sparselad.probgen import (DESK_SCALE, FLAT, GAUSSIAN, NONE, PAPER_SCALE,
                               UNIFORM, ProblemSpec, generate, generate_for_signal,
                               load_problem, rng_from_seed, save_problem, trial_seed)
from sparselad.stepsize import SQRT_PI_OVER_2


class TestGenerate:
    def test_no_outliers(self):
        prob = generate(ProblemSpec(m=30, n=80, s=4, p=0.0, outlier_kind=NONE, seed=0))
        assert np.array_equal(prob.eta, np.zeros(30))
        assert prob.T.size == 0
        assert np.array_equal(prob.b, prob.A @ prob.x0)

    def test_flat_signal(self):
        prob = generate(ProblemSpec(m=30, n=80, s=3, signal_kind=FLAT, p=0.0,
                                    outlier_kind=NONE, seed=1))
        nz = prob.x0[prob.x0 != 0]
        assert nz.size == 3
        assert np.array_equal(nz, np.ones(3))

    def test_flat_rearrangement_is_constant(self):
        prob = generate(ProblemSpec(m=30, n=80, s=5, signal_kind=FLAT, p=0.0,
                                    outlier_kind=NONE, seed=2))
        mags = np.sort(np.abs(prob.x0))[::-1]
        assert mags[0] == mags[4] == 1.0

    def test_same_seed_bitwise_identical(self):
        spec = ProblemSpec(m=40, n=100, s=5, p=0.2, outlier_scale=10.0, seed=77)
        p1, p2 = generate(spec), generate(spec)
        for field in ("A", "b", "x0", "eta", "T"):
            assert np.array_equal(getattr(p1, field), getattr(p2, field))

    def test_model_identity(self):
        prob = generate(ProblemSpec(m=50, n=120, s=5, p=0.3, outlier_scale=10.0, seed=5))
        assert np.array_equal(prob.b, prob.A @ prob.x0 + prob.eta)

    def test_outlier_count_exact(self):
        for p, m, expected in [(0.05, 1000, 50), (0.1, 40, 4), (0.125, 20, 3),
                               (0.5, 10, 5), (0.333, 9, 3)]:
            spec = ProblemSpec(m=m, n=20, s=1, p=p, outlier_scale=5.0, seed=3)
            assert spec.outlier_count() == expected
            prob = generate(spec)
            assert prob.T.size == expected
            assert np.count_nonzero(prob.eta) <= expected

    def test_eta_supported_on_T(self):
        prob = generate(ProblemSpec(m=60, n=90, s=4, p=0.25, outlier_scale=10.0, seed=8))
        assert np.array_equal(np.flatnonzero(prob.eta), prob.T)

    def test_signal_sparsity(self):
        prob = generate(ProblemSpec(m=30, n=200, s=7, p=0.0, outlier_kind=NONE, seed=9))
        assert np.count_nonzero(prob.x0) == 7

    def test_uniform_outliers_bounded(self):
        prob = generate(ProblemSpec(m=200, n=50, s=2, p=0.3, outlier_kind=UNIFORM,
                                    outlier_scale=7.0, seed=10))
        vals = prob.eta[prob.T]
        assert np.all(np.abs(vals) <= 7.0)
        assert np.any(np.abs(vals) > 1.0)

    def test_entry_variance_near_one_over_m_squared(self):
        m, n = 200, 1000
        prob = generate(ProblemSpec(m=m, n=n, s=1, p=0.0, outlier_kind=NONE, seed=11))
        var = prob.A.var()
        assert abs(var - 1.0 / m ** 2) <= 0.1 / m ** 2

    def test_column_norm_centering(self):
        # RIP1 centering: sqrt(pi/2) * ||A x||_1 concentrates around ||x||_2
        prob = generate(ProblemSpec(m=1000, n=2000, s=1, p=0.0, outlier_kind=NONE, seed=12))
        rng = np.random.default_rng(0)
        vals = []
        for _ in range(200):
            sup = rng.choice(2000, size=5, replace=False)
            d = rng.standard_normal(5)
            d /= np.linalg.norm(d)
            vals.append(SQRT_PI_OVER_2 * np.abs(prob.A[:, sup] @ d).sum())
        assert abs(np.mean(vals) - 1.0) <= 0.05

    def test_invalid_specs(self):
        with pytest.raises(ValueError):
            generate(ProblemSpec(m=0, n=10, s=1, seed=0))
        with pytest.raises(ValueError):
            generate(ProblemSpec(m=10, n=10, s=11, seed=0))
        with pytest.raises(ValueError):
            generate(ProblemSpec(m=10, n=10, s=1, p=1.5, seed=0))
        with pytest.raises(ValueError):
            generate(ProblemSpec(m=10, n=10, s=1, signal_kind="bogus", seed=0))


class TestTrialSeed:
    def test_distinct_across_indices(self):
        for base in (0, 1, 12345):
            seen = {trial_seed(base, i) for i in range(2000)}
            assert len(seen) == 2000

    def test_idempotent(self):
        assert trial_seed(42, 7) == trial_seed(42, 7)

    def test_distinct_bases_no_collisions(self):
        seeds = {trial_seed(base, trial) for base in range(100) for trial in range(10)}
        assert len(seeds) == 1000

    def test_streams_differ(self):
        a = rng_from_seed(trial_seed(0, 0)).standard_normal(8)
        b = rng_from_seed(trial_seed(0, 1)).standard_normal(8)
        assert not np.allclose(a, b)


class TestContainer:
    def test_round_trip_bitwise(self, tmp_path):
        prob = generate(ProblemSpec(m=25, n=60, s=4, p=0.2, outlier_scale=10.0, seed=21))
        path = tmp_path / "problem.bin"
        save_problem(prob, path)
        loaded = load_problem(path)
        for field in ("A", "b", "x0", "eta", "T"):
            assert np.array_equal(getattr(prob, field), getattr(loaded, field))
        assert loaded.spec == prob.spec

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "bogus.bin"
        path.write_bytes(b"NOTAPROB" + b"\x00" * 32)
        with pytest.raises(ValueError):
            load_problem(path)

    def test_truncated_rejected(self, tmp_path):
        prob = generate(ProblemSpec(m=10, n=12, s=2, p=0.2, outlier_scale=5.0, seed=22))
        path = tmp_path / "problem.bin"
        save_problem(prob, path)
        data = path.read_bytes()
        path.write_bytes(data[:-16])
        with pytest.raises(ValueError):
            load_problem(path)


class TestGenerateForSignal:
    def test_plants_given_signal(self):
        x0 = np.zeros(50)
        x0[[3, 10, 40]] = [0.5, -1.0, 2.0]
        prob = generate_for_signal(x0, m=30, outlier_kind=GAUSSIAN, outlier_scale=10.0,
                                   p=0.1, seed=5)
        assert np.array_equal(prob.x0, x0)
        assert prob.spec.s == 3
        assert np.array_equal(prob.b, prob.A @ x0 + prob.eta)
        assert prob.T.size == 3  # round(0.1 * 30)


def test_presets():
    assert PAPER_SCALE == {"m": 1000, "n": 5000}
    assert DESK_SCALE == {"m": 200, "n": 1000}
