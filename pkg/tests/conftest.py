import numpy as np
import pytest

from pafm.config import settings
from pafm.data.synthetic import gen_two_moons
from pafm.models.dataset import Dataset
from pafm.models.mlp import init_model
from pafm.utils.rng import SeededRng


@pytest.fixture(autouse=True)
def quiet_progress(monkeypatch):
    monkeypatch.setattr(settings, "show_progress", False)
    monkeypatch.setattr(settings, "seed_override", None)


def make_dataset(points, labels=None, source_mean=None, source_std=1.0) -> Dataset:
    points = np.asarray(points, dtype=np.float64)
    labels = np.zeros(points.shape[0], dtype=np.int64) if labels is None else np.asarray(labels, dtype=np.int64)
    label_set = tuple(sorted(set(labels.tolist())))
    mean = np.zeros(points.shape[1]) if source_mean is None else np.asarray(source_mean, dtype=np.float64)
    return Dataset(points, labels, label_set, mean, source_std)


@pytest.fixture
def standard_moons() -> Dataset:
    """Small two-moons set transported from the standard normal source."""
    return gen_two_moons(40, 0.05, SeededRng(3, "data"), source_mean=(0.0, 0.0), source_std=1.0)


@pytest.fixture
def shifted_moons() -> Dataset:
    """Small two-moons set with the default shifted, narrow source."""
    return gen_two_moons(40, 0.05, SeededRng(4, "data"))


@pytest.fixture
def random_dataset():
    def build(n: int, d: int = 2, seed: int = 0, n_classes: int = 1, scale: float = 1.0) -> Dataset:
        rng = np.random.default_rng(seed)
        labels = np.arange(n) % n_classes
        return make_dataset(scale * rng.normal(size=(n, d)), labels)
    return build


@pytest.fixture
def small_model():
    def build(d: int = 2, seed: int = 0, hidden: int = 16, embed_width: int = 8, n_classes: int = 0):
        return init_model(d, SeededRng(seed, "init"), hidden=hidden, embed_width=embed_width, n_classes=n_classes)
    return build
