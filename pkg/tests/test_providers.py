import numpy as np
import pytest

from pafm.data.knn import build_knn_index, precompute_knn
from pafm.errors import InvalidArgumentError
from pafm.flow.providers import (
    build_candidate_table, cosine_shortlist, provider_augmentation, provider_full_support, provider_knn,
    provider_perturbation, provider_shortlist_knn, rotation_augment,
)
from pafm.models.dataset import UNCONDITIONAL, owner_only_table, table_from_rows
from pafm.utils.rng import SeededRng
from tests.conftest import make_dataset


def _brute_force_rows(dataset, k):
    rows = {}
    for i in range(dataset.n):
        members = [j for j in range(dataset.n) if dataset.labels[j] == dataset.labels[i] and j != i]
        dist = [(float(np.sum((dataset.points[j] - dataset.points[i]) ** 2)), j) for j in members]
        rows[i] = [i] + [j for _, j in sorted(dist)][: k - 1]
    return rows


class TestKnn:
    def test_k_one_is_owner(self, standard_moons):
        rows = precompute_knn(standard_moons, 1)
        assert all(rows[i] == [i] for i in range(standard_moons.n))

    def test_collinear_class(self):
        dataset = make_dataset([[0.0, 0.0], [1.0, 0.0], [3.0, 0.0]])
        rows = precompute_knn(dataset, 2)
        assert rows == {0: [0, 1], 1: [1, 0], 2: [2, 1]}

    def test_ties_broken_by_index(self):
        dataset = make_dataset([[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]])
        assert precompute_knn(dataset, 3)[0] == [0, 1, 2]

    def test_owner_first_even_with_duplicates(self):
        dataset = make_dataset([[1.0, 1.0], [1.0, 1.0], [2.0, 2.0]])
        rows = precompute_knn(dataset, 2)
        assert rows[1] == [1, 0]

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_brute_force_sort(self, seed, random_dataset):
        dataset = random_dataset(60, d=3, seed=seed, n_classes=3)
        assert precompute_knn(dataset, 7) == _brute_force_rows(dataset, 7)

    def test_k_too_large(self):
        dataset = make_dataset([[0.0, 0.0], [1.0, 0.0], [5.0, 5.0]], labels=[0, 0, 1])
        with pytest.raises(InvalidArgumentError):
            precompute_knn(dataset, 2)
        with pytest.raises(InvalidArgumentError):
            precompute_knn(dataset, 0)

    def test_unconditioned_index_spans_classes(self):
        dataset = make_dataset([[0.0, 0.0], [0.1, 0.0], [5.0, 5.0]], labels=[0, 1, 1])
        index = build_knn_index(dataset, 2, by_class=False)
        assert index.neighbors[0].tolist() == [0, 1]


class TestProviders:
    def test_full_support(self, standard_moons):
        pool = provider_full_support(standard_moons, 5, int(standard_moons.labels[5]))
        assert pool.k == 40
        assert pool.indices[pool.owner_position] == 5
        assert provider_full_support(standard_moons, 5, UNCONDITIONAL).k == standard_moons.n

    def test_knn_pool_contains_owner_first(self, standard_moons):
        index = build_knn_index(standard_moons, 8)
        pool = provider_knn(standard_moons, index, 17, 8)
        assert pool.k == 8
        assert pool.owner_position == 0 and pool.indices[0] == 17
        assert set(standard_moons.labels[pool.indices].tolist()) == {int(standard_moons.labels[17])}

    def test_perturbation(self, standard_moons):
        pool = provider_perturbation(standard_moons, 3, 5, 0.05, SeededRng(1))
        assert pool.k == 5
        np.testing.assert_array_equal(pool.owner_point, standard_moons.points[3])
        assert np.all(pool.indices[1:] == -1)
        assert np.max(np.abs(pool.points - standard_moons.points[3])) < 0.05 * 6

    def test_zero_sigma_perturbations_equal_owner(self, standard_moons):
        pool = provider_perturbation(standard_moons, 3, 4, 0.0, SeededRng(1))
        np.testing.assert_array_equal(pool.points, np.repeat(standard_moons.points[3][None, :], 4, axis=0))

    def test_rotation_preserves_distance_to_centroid(self, standard_moons):
        centroid = standard_moons.points.mean(axis=0)
        pool = provider_augmentation(standard_moons, 2, 6, rotation_augment(centroid, 1.0, SeededRng(2)))
        radii = np.linalg.norm(pool.points - centroid, axis=1)
        np.testing.assert_allclose(radii, radii[0], rtol=1e-12)

    def test_zero_scale_rotation_is_identity(self, standard_moons):
        fn = rotation_augment(np.zeros(2), 0.0, SeededRng(0))
        np.testing.assert_allclose(fn(standard_moons.points[0], 1), standard_moons.points[0], atol=1e-15)

    def test_augmentation_shape_checked(self, standard_moons):
        with pytest.raises(InvalidArgumentError):
            provider_augmentation(standard_moons, 0, 2, lambda p, m: np.zeros(3))

    def test_cosine_shortlist_keeps_owner(self):
        emb = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.1], [-1.0, 0.0]])
        assert cosine_shortlist(emb, 0, 2).tolist() == [0, 2]

    def test_shortlist_knn(self, standard_moons):
        emb = np.hstack([np.eye(2)[standard_moons.labels] * 10.0, standard_moons.points])
        pool = provider_shortlist_knn(standard_moons, emb, 4, 20, 5)
        assert pool.k == 5
        assert pool.indices[pool.owner_position] == 4
        with pytest.raises(InvalidArgumentError):
            provider_shortlist_knn(standard_moons, emb, 4, 3, 5)


class TestCandidateTable:
    @pytest.mark.parametrize("provider", ["full", "knn", "perturbation", "augmentation", "shortlist"])
    def test_every_pool_contains_its_owner(self, provider, standard_moons):
        table = build_candidate_table(standard_moons, provider, 4, conditioned=True, rng=SeededRng(0), sigma=0.05,
                                      shortlist_m=16)
        owners = np.arange(standard_moons.n)
        assert np.all(table.indices[owners, table.owner_columns] == owners)
        assert table.uniform_condition == (provider == "shortlist")

    def test_stochastic_pools_are_deterministic(self, standard_moons):
        a = build_candidate_table(standard_moons, "perturbation", 4, False, SeededRng(5), sigma=0.1)
        b = build_candidate_table(standard_moons, "perturbation", 4, False, SeededRng(5), sigma=0.1)
        np.testing.assert_array_equal(a.bank, b.bank)
        assert not a.is_index_based()

    def test_rows_round_trip(self, standard_moons):
        table = build_candidate_table(standard_moons, "knn", 3, True, SeededRng(0))
        again = table_from_rows(standard_moons, table.dataset_rows())
        np.testing.assert_array_equal(again.indices, table.indices)

    def test_rows_must_contain_owner(self):
        dataset = make_dataset([[0.0, 0.0], [1.0, 1.0]])
        with pytest.raises(InvalidArgumentError):
            table_from_rows(dataset, {0: [0], 1: [0]})
        with pytest.raises(InvalidArgumentError):
            table_from_rows(dataset, {0: [0]})

    def test_owner_only(self, standard_moons):
        table = owner_only_table(standard_moons)
        assert table.k_max == 1
        assert table.dataset_rows()[7] == [7]

    def test_unknown_provider(self, standard_moons):
        with pytest.raises(InvalidArgumentError):
            build_candidate_table(standard_moons, "magic", 4, False, SeededRng(0))
