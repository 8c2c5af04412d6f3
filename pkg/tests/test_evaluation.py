import math

import numpy as np
import pytest

from pafm.data.synthetic import gen_two_moons
from pafm.errors import DegenerateTimeError, InvalidArgumentError, NumericFailureError
from pafm.evaluation.density import (
    energy_distance, kde, kde_many, mean_nearest_distance, mean_nn_spacing, moving_average, scott_bandwidth,
)
from pafm.evaluation.field import build_field_grid, field_mse, grid_times
from pafm.evaluation.oracle import marginal_velocity_oracle, oracle_batch, oracle_field
from pafm.evaluation.sampler import euler_sample
from pafm.evaluation.unbiasedness import theorem1_mc_check
from pafm.evaluation.variance import gradient_variance, traces_from_gradients
from pafm.flow.posterior import batch_snis
from pafm.flow.providers import build_candidate_table
from pafm.schemas.training import Objective
from pafm.utils.rng import SeededRng, gaussian_batch
from tests.conftest import make_dataset


class TestOracle:
    def test_single_point(self):
        dataset = make_dataset([[1.0, -2.0]])
        z_t, t = np.array([0.3, 0.4]), 0.25
        np.testing.assert_allclose(marginal_velocity_oracle(dataset, z_t, t), (z_t - dataset.points[0]) / t)

    def test_symmetric_pair_cancels_at_origin(self):
        dataset = make_dataset([[1.5, 0.5], [-1.5, -0.5]])
        np.testing.assert_array_equal(marginal_velocity_oracle(dataset, [0.0, 0.0], 0.6), np.zeros(2))

    def test_rejects_tiny_time(self):
        dataset = make_dataset([[1.0, 0.0]])
        with pytest.raises(DegenerateTimeError):
            marginal_velocity_oracle(dataset, [0.0, 0.0], 1e-6)

    def test_class_restriction(self):
        dataset = make_dataset([[1.0, 0.0], [-1.0, 0.0]], labels=[0, 1])
        np.testing.assert_allclose(marginal_velocity_oracle(dataset, [0.0, 0.0], 0.5, y=1), [2.0, 0.0])

    def test_matches_full_pool_snis(self, standard_moons):
        rng = SeededRng(11, "oracle")
        owners = rng.integers(standard_moons.n, 1000)
        eps = gaussian_batch(rng, 1000, standard_moons.source_mean, standard_moons.source_std)
        t = 0.05 + (0.999 - 0.05) * rng.uniform(1000)
        z_t = t[:, None] * eps + (1.0 - t)[:, None] * standard_moons.points[owners]
        table = build_candidate_table(standard_moons, "full", 0, False, SeededRng(0))
        targets = batch_snis(table, owners, z_t, eps, t, np.full(1000, -1), source_mean=standard_moons.source_mean,
                             source_std=standard_moons.source_std)
        np.testing.assert_allclose(targets.collapsed, oracle_batch(standard_moons, z_t, t), rtol=0, atol=1e-10)


class TestFieldMse:
    def test_oracle_scores_zero(self, standard_moons):
        assert field_mse(oracle_field(standard_moons), standard_moons, n_points=64, n_times=4) == pytest.approx(0.0, abs=1e-20)

    def test_offset_field_scores_offset_norm(self, standard_moons):
        oracle = oracle_field(standard_moons)
        offset = np.array([0.3, -0.4])
        score = field_mse(lambda z, t, y=None: oracle(z, t, y) + offset, standard_moons, n_points=64, n_times=4)
        assert score == pytest.approx(0.25, rel=1e-9)

    def test_zero_field_scores_mean_oracle_norm(self, standard_moons):
        grid = build_field_grid(standard_moons, 64, grid_times(4), SeededRng(1, "evalgrid"))
        expected = float(np.mean(np.sum(grid.true_velocity ** 2, axis=1)))
        assert grid.mse(lambda z, t, y=None: np.zeros_like(z)) == pytest.approx(expected, rel=1e-12)

    def test_grid_times_are_cell_midpoints_above_t_min(self):
        times = grid_times(8, 0.2)
        np.testing.assert_allclose(times, 0.2 + 0.1 * (np.arange(8) + 0.5), rtol=1e-15)
        assert times[0] > 0.2 and times[-1] < 1.0
        assert grid_times(16)[0] > 0.1

    def test_grid_times_reject_bad_t_min(self):
        for t_min in (0.0, 1.0, -0.5):
            with pytest.raises(InvalidArgumentError):
                grid_times(4, t_min)

    def test_mse_by_time_splits_the_grid(self, standard_moons):
        grid = build_field_grid(standard_moons, 32, grid_times(4), SeededRng(1, "evalgrid"))
        oracle = oracle_field(standard_moons)
        late_only = lambda z, t, y=None: oracle(z, t, y) + np.where(t > 0.5, 1.0, 0.0)[:, None]
        times, errors = grid.mse_by_time(late_only)
        np.testing.assert_array_equal(times, grid_times(4))
        np.testing.assert_allclose(errors, [0.0, 0.0, 2.0, 2.0], rtol=1e-12, atol=1e-20)
        assert grid.mse(late_only) == pytest.approx(float(np.mean(errors)), rel=1e-12)


class TestGradientVariance:
    def test_opposite_gradients(self):
        g = np.array([1.0, -2.0, 2.0])
        np.testing.assert_allclose(traces_from_gradients(np.stack([g, -g])), [9.0, 9.0])

    def test_identical_gradients_have_zero_variance(self):
        g = np.arange(5.0)
        np.testing.assert_array_equal(traces_from_gradients(np.stack([g, g, g])), np.zeros(3))

    def test_independent_of_worker_count(self, standard_moons, small_model):
        model = small_model()
        table = build_candidate_table(standard_moons, "knn", 4, False, SeededRng(0))
        serial = gradient_variance(model, standard_moons, Objective.PAFM, table, 6, 8, SeededRng(2))
        threaded = gradient_variance(model, standard_moons, Objective.PAFM, table, 6, 8, SeededRng(2), workers=3)
        np.testing.assert_array_equal(serial.traces, threaded.traces)
        assert serial.mean_trace == pytest.approx(float(np.mean(serial.traces)))
        assert len(serial.rows()) == 6

    def test_frozen_draws(self, standard_moons, small_model):
        report = gradient_variance(small_model(), standard_moons, Objective.FM, None, 4, 8, SeededRng(2), frozen=True)
        assert np.all(report.traces >= 0)
        assert report.objective == "FM"

    def test_needs_two_batches(self, standard_moons, small_model):
        with pytest.raises(InvalidArgumentError):
            gradient_variance(small_model(), standard_moons, Objective.FM, None, 1, 8, SeededRng(2))


class TestEulerSampler:
    MEAN = np.array([0.0, 3.0])

    def test_constant_field(self):
        c = np.array([0.5, -1.0])
        start = np.zeros((3, 2))
        out = euler_sample(lambda z, t, y: np.broadcast_to(c, z.shape), 3, 10, SeededRng(0), self.MEAN, 0.1, initial=start)
        np.testing.assert_allclose(out, -np.broadcast_to(c, (3, 2)), rtol=1e-12)

    def test_zero_field_returns_source_draw(self):
        out = euler_sample(lambda z, t, y: np.zeros_like(z), 20, 7, SeededRng(5, "s"), self.MEAN, 0.1)
        np.testing.assert_array_equal(out, gaussian_batch(SeededRng(5, "s"), 20, self.MEAN, 0.1))

    def test_non_finite_field_raises(self):
        with pytest.raises(NumericFailureError) as info:
            euler_sample(lambda z, t, y: np.full_like(z, np.nan), 4, 5, SeededRng(0), self.MEAN, 0.1)
        assert info.value.index == 0

    def test_needs_a_step(self):
        with pytest.raises(InvalidArgumentError):
            euler_sample(lambda z, t, y: z, 4, 0, SeededRng(0), self.MEAN, 0.1)

    def test_first_order_convergence(self):
        # dz/dt = z integrated from t=1 to 0 ends at z(1)/e
        start = np.array([[1.0, -2.0], [0.5, 3.0]])
        exact = start * math.exp(-1.0)
        errors = []
        for n_steps in (300, 600):
            out = euler_sample(lambda z, t, y: z, 2, n_steps, SeededRng(0), self.MEAN, 0.1, initial=start)
            errors.append(float(np.max(np.abs(out - exact))))
        assert errors[0] / errors[1] == pytest.approx(2.0, abs=0.05)

    def test_oracle_transport_lands_on_data(self):
        dataset = gen_two_moons(200, 0.05, SeededRng(0, "data"), source_mean=(0.0, 0.0), source_std=1.0)
        samples = euler_sample(oracle_field(dataset), 500, 300, SeededRng(1, "sample"),
                               dataset.source_mean, dataset.source_std)
        assert mean_nearest_distance(samples, dataset.points) < 3.0 * mean_nn_spacing(dataset.points)


class TestDensity:
    def test_kde_peak(self):
        h = 0.2
        assert kde(np.zeros((1, 2)), [0.0, 0.0], h) == pytest.approx(1.0 / (2 * math.pi * h * h))

    def test_kde_far_query(self):
        assert kde(np.zeros((1, 2)), [100.0, 100.0], 0.5) < 1e-20

    def test_kde_integrates_to_one(self):
        points = np.random.default_rng(0).normal(size=(50, 2))
        step = 0.05
        axis = np.arange(-6.0, 6.0, step) + step / 2
        gx, gy = np.meshgrid(axis, axis)
        values = kde_many(points, np.column_stack([gx.ravel(), gy.ravel()]), 0.3)
        assert float(np.sum(values)) * step * step == pytest.approx(1.0, abs=1e-3)

    def test_kde_rejects_bad_bandwidth(self):
        with pytest.raises(InvalidArgumentError):
            kde(np.zeros((1, 2)), [0.0, 0.0], 0.0)

    def test_scott_bandwidth_shrinks_with_n(self):
        rng = np.random.default_rng(1)
        assert scott_bandwidth(rng.normal(size=(5000, 2))) < scott_bandwidth(rng.normal(size=(50, 2)))

    def test_energy_distance_of_identical_sets(self):
        a = np.random.default_rng(2).normal(size=(40, 2))
        assert energy_distance(a, a) == 0.0

    def test_energy_distance_is_symmetric(self):
        rng = np.random.default_rng(3)
        a, b = rng.normal(size=(30, 2)), rng.normal(size=(45, 2)) + 1.0
        assert energy_distance(a, b) == energy_distance(b, a)
        assert energy_distance(a, b) > 0

    def test_energy_distance_of_point_masses(self):
        assert energy_distance(np.zeros((3, 2)), np.tile([0.0, 2.5], (4, 1))) == pytest.approx(5.0)

    def test_moving_average(self):
        np.testing.assert_allclose(moving_average(np.array([1.0, 2.0, 3.0, 4.0]), 2), [1.0, 1.5, 2.5, 3.5])
        with pytest.raises(InvalidArgumentError):
            moving_average(np.ones(3), 0)


class TestUnbiasedness:
    def test_single_point_estimators_coincide(self, small_model):
        dataset = make_dataset([[0.5, -0.5]])
        result = theorem1_mc_check(dataset, small_model(), 2000, SeededRng(0))
        assert result.fm_mean == result.pafm_mean
        assert result.paired_stderr == 0.0
        assert result.z_score == 0.0

    def test_paired_error_bar_is_tighter_than_independent(self, small_model):
        dataset = make_dataset(np.random.default_rng(4).normal(size=(8, 2)) * 2.0)
        result = theorem1_mc_check(dataset, small_model(seed=3), 40_000, SeededRng(2))
        assert 0.0 < result.paired_stderr < result.independent_stderr
        assert result.z_score == pytest.approx(abs(result.fm_mean - result.pafm_mean) / result.paired_stderr)

    def test_zero_model_closed_form(self, small_model):
        a = np.array([1.0, 0.5])
        dataset = make_dataset([a, -a])
        model = small_model()
        zero = model.with_params(np.zeros(model.n_params))
        result = theorem1_mc_check(dataset, zero, 40_000, SeededRng(1))
        expected = 2.0 + float(a @ a)
        assert abs(result.fm_mean - expected) < 4 * result.fm_stderr
        assert result.z_score < 4

    def test_random_model_on_eight_points(self, small_model):
        dataset = make_dataset(np.random.default_rng(4).normal(size=(8, 2)) * 2.0)
        result = theorem1_mc_check(dataset, small_model(seed=3), 40_000, SeededRng(2))
        assert result.z_score < 4

    def test_enumeration_limit(self, small_model):
        dataset = make_dataset(np.random.default_rng(0).normal(size=(17, 2)))
        with pytest.raises(InvalidArgumentError):
            theorem1_mc_check(dataset, small_model(), 100, SeededRng(0))
