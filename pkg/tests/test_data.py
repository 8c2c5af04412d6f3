import numpy as np
import pytest

from pafm.data.files import (
    parse_candidate_line, read_candidates, read_dataset, read_samples, read_table, write_candidates,
    write_dataset, write_samples, write_table,
)
from pafm.data.synthetic import (
    DEFAULT_SOURCE_MEAN, DEFAULT_SOURCE_STD, gen_gaussian_mixture, gen_two_moons, make_dataset, moon_point, subsample,
)
from pafm.errors import InvalidArgumentError, ParseError
from pafm.schemas.dataset import DatasetFamily, SyntheticSpec
from pafm.utils.rng import SeededRng


class TestTwoMoons:
    def test_parameterization_endpoint(self):
        np.testing.assert_array_equal(moon_point(0, 0.0), [1.0, 0.0])
        np.testing.assert_allclose(moon_point(1, np.pi / 2), [1.0, -0.5], atol=1e-15)
        assert moon_point(1, np.linspace(0.0, np.pi, 7)).shape == (7, 2)

    def test_noise_free_arcs(self):
        dataset = gen_two_moons(500, 0.0, SeededRng(0))
        upper = dataset.points[dataset.labels == 0]
        lower = dataset.points[dataset.labels == 1]
        np.testing.assert_allclose(np.sum(upper ** 2, axis=1), 1.0, atol=1e-12)
        np.testing.assert_allclose((lower[:, 0] - 1.0) ** 2 + (lower[:, 1] - 0.5) ** 2, 1.0, atol=1e-12)

    def test_default_size(self):
        dataset = make_dataset(SyntheticSpec())
        assert dataset.n == 2000
        assert dataset.label_set == (0, 1)
        np.testing.assert_array_equal(dataset.source_mean, [0.0, 3.0])
        assert dataset.source_std == 0.1

    def test_deterministic(self):
        a = gen_two_moons(50, 0.05, SeededRng(7, "data"))
        b = gen_two_moons(50, 0.05, SeededRng(7, "data"))
        np.testing.assert_array_equal(a.points, b.points)

    def test_invalid_size(self):
        with pytest.raises(InvalidArgumentError):
            gen_two_moons(0, 0.1, SeededRng(0))


class TestGaussianMixture:
    def test_single_center_zero_std(self):
        dataset = gen_gaussian_mixture([[1.0, 2.0]], [0.0], 10, SeededRng(0))
        np.testing.assert_array_equal(dataset.points, np.tile([1.0, 2.0], (10, 1)))

    def test_empirical_means(self):
        dataset = gen_gaussian_mixture([[-5.0, 0.0], [5.0, 0.0]], [0.1, 0.1], 10_000, SeededRng(1))
        for label, center in enumerate([[-5.0, 0.0], [5.0, 0.0]]):
            np.testing.assert_allclose(dataset.points[dataset.labels == label].mean(axis=0), center, atol=0.02)

    def test_labels_partition(self):
        dataset = gen_gaussian_mixture([[0.0], [1.0], [2.0]], [0.1, 0.1, 0.1], 4, SeededRng(2))
        assert np.bincount(dataset.labels).tolist() == [4, 4, 4]

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            SyntheticSpec(family=DatasetFamily.gaussian_mixture, centers=[[0.0]], center_stds=[0.1, 0.2])


class TestSubsample:
    def test_full_size_is_identity(self, standard_moons):
        assert subsample(standard_moons, standard_moons.n, SeededRng(0)) is standard_moons

    def test_balanced(self):
        dataset = gen_two_moons(1000, 0.05, SeededRng(0))
        small = subsample(dataset, 100, SeededRng(1))
        assert np.bincount(small.labels).tolist() == [50, 50]

    def test_odd_total_within_one(self):
        small = subsample(gen_two_moons(100, 0.05, SeededRng(0)), 11, SeededRng(1))
        counts = np.bincount(small.labels)
        assert counts.sum() == 11 and abs(int(counts[0]) - int(counts[1])) <= 1

    def test_deterministic(self):
        dataset = gen_two_moons(200, 0.05, SeededRng(0))
        a, b = subsample(dataset, 30, SeededRng(4)), subsample(dataset, 30, SeededRng(4))
        np.testing.assert_array_equal(a.points, b.points)

    def test_too_large(self, standard_moons):
        with pytest.raises(InvalidArgumentError):
            subsample(standard_moons, standard_moons.n + 1, SeededRng(0))


class TestFiles:
    def test_dataset_round_trip_is_bitwise(self, tmp_path):
        dataset = gen_two_moons(1000, 0.05, SeededRng(3))
        path = write_dataset(dataset, tmp_path / "dataset.csv")
        again = read_dataset(path, dataset.source_mean, dataset.source_std)
        np.testing.assert_array_equal(again.points, dataset.points)
        np.testing.assert_array_equal(again.labels, dataset.labels)
        np.testing.assert_array_equal(again.source_mean, DEFAULT_SOURCE_MEAN)
        assert again.source_std == DEFAULT_SOURCE_STD
        assert path.read_text().splitlines()[:2] == ["d,n,labels", "2,2000,0 1"]

    def test_source_mean_must_match_dimension(self, tmp_path):
        path = write_dataset(gen_two_moons(5, 0.05, SeededRng(3)), tmp_path / "dataset.csv")
        with pytest.raises(InvalidArgumentError):
            read_dataset(path, (0.0, 0.0, 3.0), DEFAULT_SOURCE_STD)

    def test_empty_dataset_file(self, tmp_path):
        path = tmp_path / "dataset.csv"
        path.write_text("")
        with pytest.raises(ParseError):
            read_dataset(path, DEFAULT_SOURCE_MEAN, DEFAULT_SOURCE_STD)

    def test_bad_row_reports_line(self, tmp_path):
        path = tmp_path / "dataset.csv"
        path.write_text("d,n,labels\n2,2,0\n0.1,0.2,0\n0.3,oops,0\n")
        with pytest.raises(ParseError) as info:
            read_dataset(path, DEFAULT_SOURCE_MEAN, DEFAULT_SOURCE_STD)
        assert info.value.line == 4

    def test_row_count_mismatch(self, tmp_path):
        path = tmp_path / "dataset.csv"
        path.write_text("d,n,labels\n2,3,0\n0.1,0.2,0\n")
        with pytest.raises(ParseError):
            read_dataset(path, DEFAULT_SOURCE_MEAN, DEFAULT_SOURCE_STD)

    def test_label_outside_declared_set(self, tmp_path):
        path = tmp_path / "dataset.csv"
        path.write_text("d,n,labels\n1,1,0\n0.5,3\n")
        with pytest.raises(ParseError):
            read_dataset(path, DEFAULT_SOURCE_MEAN, DEFAULT_SOURCE_STD)

    def test_candidate_line(self):
        assert parse_candidate_line("5: 5,12,7") == (5, [5, 12, 7])
        with pytest.raises(ParseError):
            parse_candidate_line("5 5,12")

    def test_candidates_round_trip(self, tmp_path):
        rows = {0: [0, 2], 1: [1], 2: [2, 0, 1]}
        assert read_candidates(write_candidates(rows, tmp_path / "candidates.csv")) == rows

    def test_duplicate_owner(self, tmp_path):
        path = tmp_path / "candidates.csv"
        path.write_text("0: 0\n0: 0,1\n")
        with pytest.raises(ParseError) as info:
            read_candidates(path)
        assert info.value.line == 2

    def test_samples_round_trip(self, tmp_path):
        points = np.random.default_rng(0).normal(size=(25, 2))
        path = write_samples(points, tmp_path / "samples.csv")
        assert path.read_text().splitlines()[0] == "x0,x1"
        np.testing.assert_array_equal(read_samples(path), points)

    def test_table_blank_for_none(self, tmp_path):
        path = write_table(tmp_path / "t.csv", ("a", "b"), [(1, None), (2, 0.5)])
        assert read_table(path) == [{"a": "1", "b": ""}, {"a": "2", "b": "0.5"}]
