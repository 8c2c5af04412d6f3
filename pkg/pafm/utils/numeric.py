"""Dense float64 arithmetic and log-space helpers used across the workbench.

Points are 1-D ``float64`` arrays, matrices are 2-D ``float64`` arrays. The
helpers here validate shapes and finiteness and raise ``InvalidArgumentError``
instead of letting numpy broadcast silently.
"""
import math
from typing import Iterable, Optional, Sequence, Union

import numpy as np
from scipy.special import logsumexp

from pafm.errors import InvalidArgumentError

ArrayLike = Union[np.ndarray, Sequence[float]]


def as_point(values: ArrayLike, d: Optional[int] = None, name: str = "point") -> np.ndarray:
    """Return ``values`` as a finite 1-D float64 array (no copy if already one)."""
    point = np.asarray(values, dtype=np.float64)
    if point.ndim != 1 or point.size < 1:
        raise InvalidArgumentError(f"{name} must be a non-empty vector, got shape {point.shape}")
    if d is not None and point.shape[0] != d:
        raise InvalidArgumentError(f"{name} has dimension {point.shape[0]}, expected {d}")
    if not np.all(np.isfinite(point)):
        raise InvalidArgumentError(f"{name} has non-finite coordinates")
    return point


def same_dimension(a: np.ndarray, b: np.ndarray, what: str = "operands") -> None:
    if a.shape != b.shape:
        raise InvalidArgumentError(f"{what} shape mismatch: {a.shape} vs {b.shape}")


def matvec(matrix: ArrayLike, vector: ArrayLike) -> np.ndarray:
    m = np.asarray(matrix, dtype=np.float64)
    v = np.asarray(vector, dtype=np.float64)
    if m.ndim != 2 or v.ndim != 1 or m.shape[1] != v.shape[0]:
        raise InvalidArgumentError(f"matvec shape mismatch: {m.shape} x {v.shape}")
    return m @ v


def axpy(a: float, x: ArrayLike, y: ArrayLike) -> np.ndarray:
    """a*x + y."""
    xs = np.asarray(x, dtype=np.float64)
    ys = np.asarray(y, dtype=np.float64)
    same_dimension(xs, ys, "axpy")
    if a == 0.0:
        return ys.copy()
    return a * xs + ys


def dot(x: ArrayLike, y: ArrayLike) -> float:
    xs = np.asarray(x, dtype=np.float64)
    ys = np.asarray(y, dtype=np.float64)
    if xs.ndim != 1:
        raise InvalidArgumentError(f"dot expects vectors, got shape {xs.shape}")
    same_dimension(xs, ys, "dot")
    return float(xs @ ys)


def log_sum_exp(values: Union[ArrayLike, Iterable[float]]) -> float:
    """Stable ``log(sum(exp(v)))``; entries may be -inf but not +inf or NaN."""
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=np.float64)
    if arr.size == 0:
        raise InvalidArgumentError("log_sum_exp of an empty list")
    if np.any(np.isnan(arr)) or np.any(arr == np.inf):
        raise InvalidArgumentError("log_sum_exp entries must not be NaN or +inf")
    if np.all(arr == -np.inf):
        return -math.inf
    return float(logsumexp(arr))


def log_normalize(log_values: np.ndarray, axis: int = -1) -> np.ndarray:
    """Normalized weights ``exp(v - lse(v))`` along ``axis`` (max-subtracted)."""
    with np.errstate(invalid="ignore"):
        lse = logsumexp(log_values, axis=axis, keepdims=True)
        return np.exp(log_values - lse)


def squared_norms(diff: np.ndarray) -> np.ndarray:
    """Sum of squares over the last axis."""
    return np.einsum("...d,...d->...", diff, diff)
