"""Deterministic, splittable random streams.

Every logical consumer gets its own stream keyed by ``(seed, purpose, index)``
so that work split across batches, steps or workers draws the same numbers
regardless of evaluation order. Streams are backed by the counter-based
Philox bit generator; Gaussian draws use Box-Muller on top of uniforms, with
both outputs of every pair consumed.
"""
import math
import zlib
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from pafm.errors import InvalidArgumentError

Shape = Union[int, Tuple[int, ...]]

_U64 = (1 << 64) - 1


def purpose_tag(purpose: str) -> int:
    # crc32 is stable across processes, unlike hash()
    return zlib.crc32(purpose.encode("utf-8"))


class SeededRng:
    """Single-owner random stream. Use :meth:`derive` to hand a stream to another consumer."""

    def __init__(self, seed: int, purpose: str = "root", index: int = 0):
        self.seed = int(seed)
        self.purpose = purpose
        self.index = int(index)
        sequence = np.random.SeedSequence(
            entropy=self.seed & _U64,
            spawn_key=(purpose_tag(purpose), self.index & 0xFFFFFFFF, (self.index >> 32) & 0xFFFFFFFF),
        )
        self._generator = np.random.Generator(np.random.Philox(sequence))
        self.position = 0

    def derive(self, purpose: str, index: int = 0) -> "SeededRng":
        return SeededRng(self.seed, purpose, index)

    def __repr__(self) -> str:
        return f"SeededRng(seed={self.seed}, purpose={self.purpose!r}, index={self.index}, position={self.position})"

    def uniform(self, size: Shape) -> np.ndarray:
        """Uniform draws on [0, 1)."""
        out = self._generator.random(size)
        self.position += int(np.size(out))
        return out

    def integers(self, high: int, size: Shape) -> np.ndarray:
        """Uniform integers on [0, high)."""
        if high < 1:
            raise InvalidArgumentError(f"integers needs high >= 1, got {high}")
        out = self._generator.integers(0, high, size=size, dtype=np.int64)
        self.position += int(np.size(out))
        return out

    def normal(self, shape: Shape) -> np.ndarray:
        """Standard normal draws via Box-Muller."""
        shape = (shape,) if isinstance(shape, int) else tuple(shape)
        count = int(np.prod(shape)) if shape else 1
        pairs = (count + 1) // 2
        u = self.uniform((pairs, 2))
        radius = np.sqrt(-2.0 * np.log(1.0 - u[:, 0]))
        angle = 2.0 * math.pi * u[:, 1]
        z = np.empty((pairs, 2), dtype=np.float64)
        z[:, 0] = radius * np.cos(angle)
        z[:, 1] = radius * np.sin(angle)
        return z.reshape(-1)[:count].reshape(shape)

    def permutation(self, n: int) -> np.ndarray:
        # Fisher-Yates over our own uniforms keeps the draw count explicit
        order = np.arange(n, dtype=np.int64)
        u = self.uniform(max(n - 1, 0))
        for k in range(n - 1, 0, -1):
            j = int(u[n - 1 - k] * (k + 1))
            order[k], order[j] = order[j], order[k]
        return order

    def choice_without_replacement(self, population: Sequence[int], count: int) -> np.ndarray:
        items = np.asarray(population, dtype=np.int64)
        if count > items.size:
            raise InvalidArgumentError(f"cannot choose {count} from {items.size} without replacement")
        return items[self.permutation(items.size)[:count]]


def gaussian_sample(rng: SeededRng, d: int, mean: Optional[np.ndarray], std: float) -> np.ndarray:
    """``mean + std * eta`` with eta ~ N(0, I_d)."""
    if d < 1:
        raise InvalidArgumentError(f"dimension must be >= 1, got {d}")
    if std < 0:
        raise InvalidArgumentError(f"std must be non-negative, got {std}")
    center = np.zeros(d) if mean is None else np.asarray(mean, dtype=np.float64)
    if center.shape != (d,):
        raise InvalidArgumentError(f"mean has shape {center.shape}, expected ({d},)")
    return center + std * rng.normal(d)


def gaussian_batch(rng: SeededRng, n: int, mean: np.ndarray, std: float) -> np.ndarray:
    """n draws of shape (n, d) from N(mean, std² I)."""
    if std < 0:
        raise InvalidArgumentError(f"std must be non-negative, got {std}")
    center = np.asarray(mean, dtype=np.float64)
    return center[None, :] + std * rng.normal((n, center.shape[0]))
