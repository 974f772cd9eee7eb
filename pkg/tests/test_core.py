import numpy as np
import pytest

from sparselad.core import (hard_threshold, matvec, residual, restrict_to_support,
                            sign_vector, support, transpose_matvec)


def brute_force_hard_threshold(x, s):
    """Independent oracle: sort indices by (-|x_i|, i), keep the first s."""
    order = sorted(range(len(x)), key=lambda i: (-abs(x[i]), i))
    kept = sorted(order[:s])
    out = np.zeros(len(x))
    for i in kept:
        out[i] = x[i]
    return out, np.array([i for i in kept if x[i] != 0], dtype=np.int64)


class TestMatvec:
    def test_identity(self):
        assert np.array_equal(matvec(np.eye(2), [3.0, -1.0]), [3.0, -1.0])

    def test_hand_product(self):
        assert np.array_equal(matvec([[1.0, 2.0], [0.0, 1.0]], [1.0, 1.0]), [3.0, 1.0])

    def test_row_sum(self):
        a, b, c = 1.5, -2.0, 0.25
        assert np.array_equal(matvec([[1.0, 1.0, 1.0]], [a, b, c]), [a + b + c])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            matvec(np.eye(2), [1.0, 2.0, 3.0])


class TestTransposeMatvec:
    def test_identity(self):
        v = np.array([2.0, 5.0])
        assert np.array_equal(transpose_matvec(np.eye(2), v), v)

    def test_hand_product(self):
        assert np.array_equal(transpose_matvec([[1.0, 2.0], [0.0, 1.0]], [1.0, 1.0]),
                              [1.0, 3.0])

    def test_row_scaling(self):
        assert np.array_equal(transpose_matvec([[1.0, 2.0, 3.0]], [2.0]), [2.0, 4.0, 6.0])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            transpose_matvec(np.eye(2), [1.0, 2.0, 3.0])

    def test_adjointness(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            m, n = rng.integers(1, 12, size=2)
            A = rng.normal(size=(m, n))
            x, v = rng.normal(size=n), rng.normal(size=m)
            lhs = matvec(A, x) @ v
            rhs = x @ transpose_matvec(A, v)
            assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


class TestResidual:
    def test_zero_at_truth(self):
        rng = np.random.default_rng(0)
        A = rng.normal(size=(4, 6))
        x = rng.normal(size=6)
        assert np.allclose(residual(A, x, A @ x), 0.0)

    def test_identity_case(self):
        assert np.array_equal(residual(np.eye(2), [0.0, 0.0], [1.0, 2.0]), [1.0, 2.0])

    def test_recovers_outliers(self):
        rng = np.random.default_rng(1)
        A = rng.normal(size=(5, 3))
        x0 = rng.normal(size=3)
        eta = np.array([0.0, 9.0, 0.0, -4.0, 0.0])
        assert np.allclose(residual(A, x0, A @ x0 + eta), eta)


class TestSignVector:
    def test_mixed(self):
        assert np.array_equal(sign_vector([3.0, -0.5, 0.0]), [1.0, -1.0, 0.0])

    def test_zero(self):
        assert np.array_equal(sign_vector(np.zeros(4)), np.zeros(4))

    def test_negative_scalar(self):
        assert np.array_equal(sign_vector([-7.0]), [-1.0])


class TestHardThreshold:
    def test_basic(self):
        out, sup = hard_threshold([3.0, -5.0, 1.0], 2)
        assert np.array_equal(out, [3.0, -5.0, 0.0])
        assert np.array_equal(sup, [0, 1])

    def test_zero_input_empty_support(self):
        out, sup = hard_threshold([0.0, 0.0, 0.0], 1)
        assert np.array_equal(out, np.zeros(3))
        assert sup.size == 0

    def test_tie_lowest_index(self):
        out, sup = hard_threshold([2.0, -2.0, 1.0], 1)
        assert np.array_equal(out, [2.0, 0.0, 0.0])
        assert np.array_equal(sup, [0])

    def test_s_out_of_range(self):
        with pytest.raises(ValueError):
            hard_threshold([1.0, 2.0], 3)
        with pytest.raises(ValueError):
            hard_threshold([1.0, 2.0], -1)

    def test_oracle_equivalence_1000_vectors(self):
        rng = np.random.default_rng(123)
        for trial in range(1000):
            n = int(rng.integers(1, 51))
            # quantized values force heavy magnitude ties
            x = np.round(rng.normal(size=n) * 2) / 2
            s = int(rng.integers(0, n + 1))
            out, sup = hard_threshold(x, s)
            exp_out, exp_sup = brute_force_hard_threshold(x, s)
            assert np.array_equal(out, exp_out), (trial, x, s)
            assert np.array_equal(sup, exp_sup), (trial, x, s)

    def test_idempotent(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            x = rng.normal(size=30)
            s = int(rng.integers(0, 31))
            once, _ = hard_threshold(x, s)
            twice, _ = hard_threshold(once, s)
            assert np.array_equal(once, twice)

    def test_output_sparsity_bound(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            x = rng.normal(size=25)
            s = int(rng.integers(0, 26))
            out, sup = hard_threshold(x, s)
            assert np.count_nonzero(out) <= s
            assert sup.size <= s

    def test_min_kept_at_least_max_dropped(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            x = np.round(rng.normal(size=20), 1)
            s = int(rng.integers(1, 20))
            out, _ = hard_threshold(x, s)
            kept = np.abs(x[out != 0])
            dropped = np.abs(x[out == 0])
            if kept.size and dropped.size:
                assert kept.min() >= dropped.max() - 1e-15

    def test_restrict_roundtrip(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            x = rng.normal(size=15)
            s = int(rng.integers(0, 16))
            out, sup = hard_threshold(x, s)
            assert np.array_equal(restrict_to_support(out, sup), out)


class TestRestrictToSupport:
    def test_basic(self):
        assert np.array_equal(restrict_to_support([1.0, 2.0, 3.0], np.array([0, 2])),
                              [1.0, 0.0, 3.0])

    def test_full_support_identity(self):
        x = np.array([4.0, -1.0, 2.0])
        assert np.array_equal(restrict_to_support(x, np.arange(3)), x)

    def test_empty_support(self):
        assert np.array_equal(restrict_to_support([1.0, 2.0], np.array([], dtype=np.int64)),
                              [0.0, 0.0])

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            restrict_to_support([1.0, 2.0], np.array([5]))


def test_support_sorted_nonzero():
    assert np.array_equal(support(np.array([0.0, 1.0, 0.0, -2.0])), [1, 3])
