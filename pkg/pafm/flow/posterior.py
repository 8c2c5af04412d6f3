"""Self-normalized importance weights over candidate targets.

For an intermediate z_t generated from owner z^i, each candidate z^j gets
log alpha_j = log p_t(z_t | z^j) + log p(y^i | z^j); the proposal is the
uniform prior over the pool, so normalized alphas are the SNIS weights and
the regression target collapses to sum_j w_j v(z_t | z^j).
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from pafm.errors import InternalInvariantError, InvalidArgumentError
from pafm.flow.path import DEFAULT_T_EPS, PathPoint, batch_log_path_likelihood, log_path_likelihood
from pafm.models.dataset import UNCONDITIONAL, CandidatePool, CandidateTable
from pafm.utils.numeric import log_normalize, log_sum_exp


@dataclass(frozen=True)
class WeightedTarget:
    weights: np.ndarray
    ess: float
    collapsed_velocity: np.ndarray
    log_alphas: np.ndarray


def condition_log_likelihood(y_i: int, y_j: int) -> float:
    """Class indicator: log 1 on a match, -inf otherwise. The unconditional label matches everything."""
    if y_i == UNCONDITIONAL or y_j == UNCONDITIONAL:
        return 0.0
    return 0.0 if int(y_i) == int(y_j) else -np.inf


class ConditionLikelihood:
    """Hook for condition models richer than the class indicator (e.g. embedding similarity)."""

    def log_likelihood(self, y_i: int, candidate_labels: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class ClassIndicator(ConditionLikelihood):
    def log_likelihood(self, y_i: int, candidate_labels: np.ndarray) -> np.ndarray:
        if y_i == UNCONDITIONAL:
            return np.zeros(candidate_labels.shape, dtype=np.float64)
        return np.where((candidate_labels == y_i) | (candidate_labels == UNCONDITIONAL), 0.0, -np.inf)


def kish_ess(weights) -> float:
    """1 / sum(w²) for normalized, non-negative weights."""
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.size == 0:
        raise InvalidArgumentError("kish_ess needs a non-empty weight vector")
    if np.any(w < 0) or abs(float(np.sum(w)) - 1.0) > 1e-9:
        raise InvalidArgumentError(f"weights must be non-negative and sum to 1 (sum={np.sum(w)!r})")
    ess = 1.0 / float(w @ w)
    # 1/sum(w²) can land a few ulps outside [1, K]
    return min(max(ess, 1.0), float(w.size))


def _owner_velocity(path: PathPoint, owner_point: np.ndarray) -> np.ndarray:
    return path.eps - owner_point


def snis_weights(
    path: PathPoint,
    y_i: int,
    pool: CandidatePool,
    t_eps: float = DEFAULT_T_EPS,
    condition: Optional[ConditionLikelihood] = None,
    source_mean: Optional[np.ndarray] = None,
    source_std: float = 1.0,
) -> WeightedTarget:
    """Weights, ESS and collapsed velocity for one intermediate against one pool."""
    t = float(path.t)
    if not 0.0 <= t < 1.0:
        raise InvalidArgumentError(f"t must lie in [0, 1), got {t}")
    owner = pool.owner_point
    k = pool.k
    if t < t_eps:
        weights = np.zeros(k)
        weights[pool.owner_position] = 1.0
        log_alphas = np.full(k, -np.inf)
        log_alphas[pool.owner_position] = 0.0
        return WeightedTarget(weights, 1.0, _owner_velocity(path, owner), log_alphas)

    condition = condition or ClassIndicator()
    cond = condition.log_likelihood(y_i, pool.labels)
    log_alphas = np.array([log_path_likelihood(path.z_t, pool.points[j], t, source_mean, source_std) for j in range(k)]) + cond
    if np.all(log_alphas == -np.inf):
        raise InternalInvariantError(f"every candidate of owner {pool.owner_index} has zero weight")
    lse = log_sum_exp(log_alphas)
    weights = np.exp(log_alphas - lse)

    velocities = (path.z_t[None, :] - pool.points) / t
    same_as_owner = np.all(pool.points == owner[None, :], axis=1)
    velocities[same_as_owner] = _owner_velocity(path, owner)
    collapsed = weights @ velocities
    return WeightedTarget(weights, kish_ess(weights), collapsed, log_alphas)


@dataclass(frozen=True)
class BatchTargets:
    """Per-element weights and collapsed targets for a training batch.

    ``velocities`` is only filled when the caller asks for the per-candidate
    form (weighted-sum regression or the gradient identity audit).
    """
    weights: np.ndarray                   # (B, K)
    collapsed: np.ndarray                 # (B, d)
    ess: np.ndarray                       # (B,)
    velocities: Optional[np.ndarray] = None   # (B, K, d)


def candidate_velocities(
    cand: np.ndarray,
    valid: np.ndarray,
    owner_points: np.ndarray,
    z_t: np.ndarray,
    eps: np.ndarray,
    t_safe: np.ndarray,
) -> np.ndarray:
    """(z_t - z_j)/t per candidate; copies of the owner take eps - z exactly, padding is zero."""
    owner_velocity = eps - owner_points
    velocities = (z_t[:, None, :] - cand) / t_safe[:, None, None]
    same_as_owner = np.all(cand == owner_points[:, None, :], axis=2) & valid
    velocities = np.where(same_as_owner[:, :, None], owner_velocity[:, None, :], velocities)
    return np.where(valid[:, :, None], velocities, 0.0)


def batch_snis(
    table: CandidateTable,
    owners: np.ndarray,
    z_t: np.ndarray,
    eps: np.ndarray,
    t: np.ndarray,
    y: np.ndarray,
    t_eps: float = DEFAULT_T_EPS,
    source_mean: Optional[np.ndarray] = None,
    source_std: float = 1.0,
    with_velocities: bool = False,
) -> BatchTargets:
    """Vectorized :func:`snis_weights` over a batch drawn from ``table``'s owners.

    y holds the conditioning label per element (UNCONDITIONAL for none).
    The collapsed target is (z_t - sum_j w_j z_j)/t with the owner's term
    swapped for eps - z, so an owner holding all the weight yields eps - z bit
    for bit.
    """
    idx = table.indices[owners]                         # (B, K)
    valid = idx >= 0
    safe_idx = np.where(valid, idx, 0)
    cand = table.bank[safe_idx]                         # (B, K, d)
    owner_points = table.bank[owners]                   # owners are dataset rows of the bank
    owner_cols = table.owner_columns[owners]
    b = owners.shape[0]
    rows = np.arange(b)

    degenerate = t < t_eps
    t_safe = np.where(degenerate, 1.0, t)
    log_alphas = batch_log_path_likelihood(z_t, cand, t_safe, source_mean, source_std)
    if not table.uniform_condition:
        labels = table.bank_labels[safe_idx]
        mismatch = (y[:, None] != UNCONDITIONAL) & (labels != y[:, None])
        log_alphas = np.where(mismatch, -np.inf, log_alphas)
    log_alphas = np.where(valid, log_alphas, -np.inf)
    if np.any(np.all(log_alphas == -np.inf, axis=1) & ~degenerate):
        raise InternalInvariantError("a batch element has zero total candidate weight")
    weights = log_normalize(log_alphas, axis=1)
    weights = np.where(valid, weights, 0.0)
    if np.any(degenerate):
        weights[degenerate] = 0.0
        weights[rows[degenerate], owner_cols[degenerate]] = 1.0

    owner_velocity = eps - owner_points                 # (B, d)
    owner_weight = weights[rows, owner_cols]
    mean_target = np.einsum("bk,bkd->bd", weights, cand)
    collapsed = (z_t - mean_target) / t_safe[:, None]
    collapsed += owner_weight[:, None] * (owner_velocity - (z_t - owner_points) / t_safe[:, None])
    settled = degenerate | (owner_weight == 1.0)
    collapsed[settled] = owner_velocity[settled]

    ess = 1.0 / np.einsum("bk,bk->b", weights, weights)
    sizes = np.sum(valid, axis=1)
    ess = np.clip(ess, 1.0, sizes.astype(np.float64))
    velocities = None
    if with_velocities:
        velocities = candidate_velocities(cand, valid, owner_points, z_t, eps, t_safe)
    return BatchTargets(weights=weights, collapsed=collapsed, ess=ess, velocities=velocities)
