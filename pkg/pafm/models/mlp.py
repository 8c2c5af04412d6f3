"""Time-conditioned velocity network f_theta(z_t | t, y).

Four affine layers (d + embed [+ classes] -> h -> h -> h -> d) with SiLU
between them and identity at the output. Parameters live in one flat float64
vector so the optimizer, checkpoints and finite-difference checks can treat
them uniformly; backprop is written out by hand.
"""
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.special import expit

from pafm.errors import InvalidArgumentError, NumericFailureError
from pafm.models.dataset import UNCONDITIONAL
from pafm.utils.rng import SeededRng

DEFAULT_OMEGA_MAX = 2.0 * math.pi * 50.0


@dataclass(frozen=True)
class TimeEmbedding:
    """Interleaved [sin(t w_k), cos(t w_k)] on a geometric frequency ladder starting at ``omega_max``."""
    width: int = 32
    omega_max: float = DEFAULT_OMEGA_MAX

    def __post_init__(self):
        if self.width < 2 or self.width % 2:
            raise InvalidArgumentError(f"time embedding width must be even and >= 2, got {self.width}")

    @property
    def frequencies(self) -> np.ndarray:
        half = self.width // 2
        if half == 1:
            return np.array([self.omega_max])
        k = np.arange(half, dtype=np.float64)
        return self.omega_max * np.power(10000.0, -k / (half - 1))

    def __call__(self, t) -> np.ndarray:
        ts = np.atleast_1d(np.asarray(t, dtype=np.float64))
        phase = ts[:, None] * self.frequencies[None, :]
        out = np.empty((ts.shape[0], self.width), dtype=np.float64)
        out[:, 0::2] = np.sin(phase)
        out[:, 1::2] = np.cos(phase)
        return out


def time_embed(t: float, width: int = 32, omega_max: float = DEFAULT_OMEGA_MAX) -> np.ndarray:
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise InvalidArgumentError(f"t must lie in [0, 1], got {t}")
    return TimeEmbedding(width, omega_max)(t)[0]


def layer_dims(d: int, hidden: int, embed: int, n_classes: int, layers: int) -> List[Tuple[int, int]]:
    if layers < 1:
        raise InvalidArgumentError(f"need at least one layer, got {layers}")
    widths = [d + embed + n_classes] + [hidden] * (layers - 1) + [d]
    return list(zip(widths[:-1], widths[1:]))


def parameter_count(d: int, hidden: int = 128, embed: int = 32, n_classes: int = 0, layers: int = 4) -> int:
    return sum(fan_in * fan_out + fan_out for fan_in, fan_out in layer_dims(d, hidden, embed, n_classes, layers))


@dataclass(frozen=True)
class MlpModel:
    d: int
    params: np.ndarray
    hidden: int = 128
    embed: TimeEmbedding = field(default_factory=TimeEmbedding)
    n_classes: int = 0          # 0 = unconditioned
    layers: int = 4

    def __post_init__(self):
        expected = parameter_count(self.d, self.hidden, self.embed.width, self.n_classes, self.layers)
        params = np.asarray(self.params, dtype=np.float64)
        if params.shape != (expected,):
            raise InvalidArgumentError(f"parameter vector has shape {params.shape}, expected ({expected},)")
        object.__setattr__(self, "params", params)

    @property
    def conditioned(self) -> bool:
        return self.n_classes > 0

    @property
    def n_params(self) -> int:
        return int(self.params.shape[0])

    def dims(self) -> List[Tuple[int, int]]:
        return layer_dims(self.d, self.hidden, self.embed.width, self.n_classes, self.layers)

    def unpack(self, flat: Optional[np.ndarray] = None) -> List[Tuple[np.ndarray, np.ndarray]]:
        """(W, b) views into ``flat`` (default: this model's parameters); W is (fan_in, fan_out)."""
        flat = self.params if flat is None else flat
        out = []
        offset = 0
        for fan_in, fan_out in self.dims():
            w = flat[offset:offset + fan_in * fan_out].reshape(fan_in, fan_out)
            offset += fan_in * fan_out
            b = flat[offset:offset + fan_out]
            offset += fan_out
            out.append((w, b))
        return out

    def with_params(self, params: np.ndarray) -> "MlpModel":
        return MlpModel(self.d, params, self.hidden, self.embed, self.n_classes, self.layers)


def init_model(
    d: int,
    rng: SeededRng,
    hidden: int = 128,
    embed_width: int = 32,
    n_classes: int = 0,
    layers: int = 4,
    omega_max: float = DEFAULT_OMEGA_MAX,
) -> MlpModel:
    """Weights ~ U(±1/sqrt(fan_in)), biases zero."""
    embed = TimeEmbedding(embed_width, omega_max)
    dims = layer_dims(d, hidden, embed_width, n_classes, layers)
    chunks = []
    for fan_in, fan_out in dims:
        bound = 1.0 / math.sqrt(fan_in)
        chunks.append((2.0 * rng.uniform(fan_in * fan_out) - 1.0) * bound)
        chunks.append(np.zeros(fan_out))
    return MlpModel(d, np.concatenate(chunks), hidden, embed, n_classes, layers)


def _silu(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    s = expit(x)
    return x * s, s


def build_inputs(model: MlpModel, z_t: np.ndarray, t: np.ndarray, y: Optional[np.ndarray]) -> np.ndarray:
    z_t = np.asarray(z_t, dtype=np.float64)
    if z_t.ndim != 2 or z_t.shape[1] != model.d:
        raise InvalidArgumentError(f"z_t must have shape (B, {model.d}), got {z_t.shape}")
    t = np.broadcast_to(np.asarray(t, dtype=np.float64), (z_t.shape[0],))
    if np.any(t < 0.0) or np.any(t > 1.0):
        raise InvalidArgumentError("t must lie in [0, 1]")
    parts = [z_t, model.embed(t)]
    if model.conditioned:
        one_hot = np.zeros((z_t.shape[0], model.n_classes))
        if y is not None:
            labels = np.broadcast_to(np.asarray(y, dtype=np.int64), (z_t.shape[0],))
            rows = np.flatnonzero(labels != UNCONDITIONAL)
            if np.any(labels[rows] >= model.n_classes) or np.any(labels[rows] < 0):
                raise InvalidArgumentError(f"labels must lie in [0, {model.n_classes})")
            one_hot[rows, labels[rows]] = 1.0
        parts.append(one_hot)
    return np.hstack(parts)


def _forward_cached(model: MlpModel, x: np.ndarray):
    acts = [x]
    gates = []
    h = x
    layers = model.unpack()
    for li, (w, b) in enumerate(layers):
        z = h @ w + b
        if li < len(layers) - 1:
            h, s = _silu(z)
            gates.append((z, s))
            acts.append(h)
        else:
            h = z
    return h, acts, gates


def forward_batch(model: MlpModel, z_t: np.ndarray, t, y=None) -> np.ndarray:
    """Velocity predictions of shape (B, d)."""
    out, _, _ = _forward_cached(model, build_inputs(model, z_t, t, y))
    return out


def forward(model: MlpModel, z_t, t: float, y: int = UNCONDITIONAL) -> np.ndarray:
    """Single-point velocity prediction."""
    z = np.asarray(z_t, dtype=np.float64)
    if z.shape != (model.d,):
        raise InvalidArgumentError(f"z_t has shape {z.shape}, expected ({model.d},)")
    return forward_batch(model, z[None, :], np.array([t]), np.array([y]))[0]


def backward(
    model: MlpModel,
    z_t: np.ndarray,
    t: np.ndarray,
    y: Optional[np.ndarray],
    targets: np.ndarray,
    weights: Optional[np.ndarray] = None,
) -> Tuple[float, np.ndarray]:
    """Loss and exact gradient w.r.t. the flat parameter vector.

    Collapsed form (``weights`` None): loss = mean_b ||f_b - targets_b||².
    Weighted form: targets is (B, K, d), weights (B, K) and
    loss = mean_b sum_j w_bj ||f_b - targets_bj||².
    """
    x = build_inputs(model, z_t, t, y)
    batch = x.shape[0]
    if batch < 1:
        raise InvalidArgumentError("backward needs a non-empty batch")
    out, acts, gates = _forward_cached(model, x)
    bad = np.flatnonzero(~np.all(np.isfinite(out), axis=1))
    if bad.size:
        raise NumericFailureError(f"non-finite prediction at batch element {int(bad[0])}", index=int(bad[0]))

    if weights is None:
        resid = out - targets
        per_elem = np.einsum("bd,bd->b", resid, resid)
        grad_out = 2.0 * resid / batch
    else:
        diff = out[:, None, :] - targets
        per_elem = np.einsum("bk,bkd,bkd->b", weights, diff, diff)
        grad_out = 2.0 * np.einsum("bk,bkd->bd", weights, diff) / batch
    loss = float(np.mean(per_elem))

    grad = np.zeros_like(model.params)
    grad_layers = model.unpack(grad)
    layers = model.unpack()
    delta = grad_out
    for li in range(len(layers) - 1, -1, -1):
        w, _ = layers[li]
        gw, gb = grad_layers[li]
        gw[...] = acts[li].T @ delta
        gb[...] = delta.sum(axis=0)
        if li > 0:
            z, s = gates[li - 1]
            delta = (delta @ w.T) * (s * (1.0 + z * (1.0 - s)))
    return loss, grad


def weighted_sum_backward(
    model: MlpModel,
    z_t: np.ndarray,
    t: np.ndarray,
    y: Optional[np.ndarray],
    velocities: np.ndarray,
    weights: np.ndarray,
) -> Tuple[float, np.ndarray]:
    """Gradient of mean_b sum_j w_bj ||f_b - v_bj||², equal to the collapsed-target gradient."""
    if velocities.ndim != 3 or weights.shape != velocities.shape[:2]:
        raise InvalidArgumentError(f"velocities {velocities.shape} and weights {weights.shape} do not line up")
    return backward(model, z_t, t, y, velocities, weights)
