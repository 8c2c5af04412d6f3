import numpy as np
import pytest

from pafm.errors import DegenerateTimeError, InvalidArgumentError
from pafm.flow.path import (
    batch_log_path_likelihood, conditional_velocity, interpolate, log_path_likelihood, make_path_point,
)


class TestInterpolate:
    def test_endpoints(self):
        z, eps = np.array([1.0, 2.0]), np.array([-1.0, 0.5])
        np.testing.assert_array_equal(interpolate(z, eps, 0.0), z)
        np.testing.assert_allclose(interpolate(z, eps, 0.5), [0.0, 1.25])

    def test_t_one_rejected(self):
        with pytest.raises(InvalidArgumentError):
            interpolate([0.0], [1.0], 1.0)

    def test_path_point_records_inputs(self):
        point = make_path_point([1.0, 1.0], [0.0, 0.0], 0.25, 7)
        assert point.data_index == 7
        np.testing.assert_allclose(point.z_t, [0.75, 0.75])


class TestConditionalVelocity:
    def test_matches_eps_minus_z(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            z, eps, t = rng.normal(size=3), rng.normal(size=3), rng.uniform(0.01, 0.99)
            np.testing.assert_allclose(conditional_velocity(interpolate(z, eps, t), z, t), eps - z, atol=1e-12)

    @pytest.mark.parametrize("t", [0.0, 1e-5, 1e-4])
    def test_degenerate_time(self, t):
        with pytest.raises(DegenerateTimeError):
            conditional_velocity([0.0, 0.0], [1.0, 1.0], t)


class TestLogPathLikelihood:
    def test_mode_is_zero(self):
        z = np.array([0.3, -0.2])
        assert log_path_likelihood(0.6 * z, z, 0.4) == 0.0

    def test_known_value(self):
        assert log_path_likelihood([1.0, 0.0], [0.0, 0.0], 0.5) == pytest.approx(-2.0)

    def test_shifted_source_mode(self):
        mean, z, t = np.array([0.0, 3.0]), np.array([1.0, 0.0]), 0.3
        z_t = t * mean + (1.0 - t) * z
        assert log_path_likelihood(z_t, z, t, mean, 0.1) == pytest.approx(0.0, abs=1e-12)

    def test_degenerate_and_out_of_range(self):
        with pytest.raises(DegenerateTimeError):
            log_path_likelihood([0.0], [0.0], 0.0)
        with pytest.raises(InvalidArgumentError):
            log_path_likelihood([0.0], [0.0], 1.5)

    def test_batch_matches_scalar(self):
        rng = np.random.default_rng(1)
        z_t, targets, t = rng.normal(size=(5, 2)), rng.normal(size=(7, 2)), rng.uniform(0.05, 1.0, size=5)
        mean = np.array([0.5, -1.0])
        batch = batch_log_path_likelihood(z_t, targets, t, mean, 0.7)
        for b in range(5):
            for k in range(7):
                assert batch[b, k] == pytest.approx(log_path_likelihood(z_t[b], targets[k], t[b], mean, 0.7), rel=1e-12)

    def test_invariant_under_joint_rotation(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            angle = rng.uniform(0.0, 2.0 * np.pi)
            rotation = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
            z_t, z, t = rng.normal(size=2), rng.normal(size=2), rng.uniform(0.05, 1.0)
            before = log_path_likelihood(z_t, z, t)
            after = log_path_likelihood(rotation @ z_t, rotation @ z, t)
            assert after == pytest.approx(before, rel=1e-12, abs=1e-12)
