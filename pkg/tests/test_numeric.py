import math

import numpy as np
import pytest

from pafm.errors import InvalidArgumentError
from pafm.utils.numeric import as_point, axpy, dot, log_normalize, log_sum_exp, matvec
from pafm.utils.rng import SeededRng, gaussian_batch, gaussian_sample


class TestLinearAlgebra:
    def test_axpy(self):
        np.testing.assert_array_equal(axpy(2.0, [1.0, 2.0], [0.5, 0.5]), [2.5, 4.5])

    def test_axpy_zero_scale_returns_y(self):
        y = np.array([1.0, -3.0])
        out = axpy(0.0, [np.inf, 1.0], y)
        np.testing.assert_array_equal(out, y)
        assert out is not y

    def test_dot_and_matvec(self):
        assert dot([1.0, 2.0, 3.0], [4.0, 5.0, 6.0]) == 32.0
        np.testing.assert_array_equal(matvec([[1.0, 0.0], [0.0, 2.0]], [3.0, 4.0]), [3.0, 8.0])

    @pytest.mark.parametrize("a, b", [([1.0, 2.0], [1.0]), ([1.0], [1.0, 2.0, 3.0])])
    def test_dimension_mismatch(self, a, b):
        with pytest.raises(InvalidArgumentError):
            dot(a, b)
        with pytest.raises(InvalidArgumentError):
            axpy(1.0, a, b)

    def test_as_point_rejects_non_finite(self):
        with pytest.raises(InvalidArgumentError):
            as_point([1.0, np.nan])


class TestLogSumExp:
    def test_two_zeros(self):
        assert log_sum_exp([0.0, 0.0]) == pytest.approx(math.log(2.0), abs=1e-15)

    def test_large_values_are_stable(self):
        assert log_sum_exp([1000.0, 1000.0]) == pytest.approx(1000.0 + math.log(2.0))

    def test_all_negative_infinity(self):
        assert log_sum_exp([-np.inf, -np.inf]) == -np.inf

    def test_partial_negative_infinity(self):
        assert log_sum_exp([-np.inf, 1.5]) == 1.5

    @pytest.mark.parametrize("values", [[], [np.nan, 0.0], [np.inf]])
    def test_invalid(self, values):
        with pytest.raises(InvalidArgumentError):
            log_sum_exp(values)

    def test_bounded_by_max_and_count(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            n = int(rng.integers(1, 50))
            values = rng.normal(scale=rng.uniform(0.1, 100.0), size=n)
            result = log_sum_exp(values)
            assert values.max() <= result <= values.max() + math.log(n) + 1e-12

    def test_log_normalize_rows(self):
        w = log_normalize(np.array([[0.0, 0.0], [math.log(3.0), 0.0]]), axis=1)
        np.testing.assert_allclose(w, [[0.5, 0.5], [0.75, 0.25]], atol=1e-15)


class TestSeededRng:
    def test_same_key_same_stream(self):
        a = SeededRng(11, "train", 5)
        b = SeededRng(11, "train", 5)
        np.testing.assert_array_equal(a.uniform(10), b.uniform(10))
        np.testing.assert_array_equal(a.normal((3, 2)), b.normal((3, 2)))

    @pytest.mark.parametrize("other", [(12, "train", 5), (11, "train", 6), (11, "gradvar", 5)])
    def test_different_key_different_stream(self, other):
        assert not np.array_equal(SeededRng(11, "train", 5).uniform(8), SeededRng(*other).uniform(8))

    def test_derive_ignores_parent_position(self):
        parent = SeededRng(2)
        parent.uniform(100)
        np.testing.assert_array_equal(parent.derive("x", 3).uniform(4), SeededRng(2, "x", 3).uniform(4))

    def test_position_counts_draws(self):
        rng = SeededRng(0)
        rng.uniform(3)
        rng.integers(10, 4)
        assert rng.position == 7

    def test_normal_moments(self):
        z = SeededRng(5).normal(200_000)
        assert abs(z.mean()) < 0.01
        assert z.std() == pytest.approx(1.0, abs=0.01)

    def test_odd_normal_count(self):
        assert SeededRng(5).normal(7).shape == (7,)

    def test_permutation(self):
        perm = SeededRng(9).permutation(50)
        np.testing.assert_array_equal(np.sort(perm), np.arange(50))

    def test_choice_without_replacement_too_many(self):
        with pytest.raises(InvalidArgumentError):
            SeededRng(0).choice_without_replacement([1, 2, 3], 4)

    def test_gaussian_sample_shifted(self):
        draws = gaussian_batch(SeededRng(1), 50_000, np.array([0.0, 3.0]), 0.1)
        np.testing.assert_allclose(draws.mean(axis=0), [0.0, 3.0], atol=0.005)
        np.testing.assert_allclose(draws.std(axis=0), [0.1, 0.1], atol=0.005)

    def test_gaussian_sample_rejects_bad_mean(self):
        with pytest.raises(InvalidArgumentError):
            gaussian_sample(SeededRng(0), 3, np.zeros(2), 1.0)
