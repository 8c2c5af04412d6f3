"""Adam with bias correction and the cosine learning-rate schedule."""
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Tuple, Union

import numpy as np

from pafm.errors import InvalidArgumentError, ParseError


@dataclass(frozen=True)
class OptimizerState:
    m: np.ndarray
    v: np.ndarray
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def zeros(cls, n_params: int) -> "OptimizerState":
        return cls(np.zeros(n_params), np.zeros(n_params))


def adam_step(state: OptimizerState, params: np.ndarray, gradient: np.ndarray, lr: float) -> Tuple[OptimizerState, np.ndarray]:
    if params.shape != gradient.shape or state.m.shape != params.shape:
        raise InvalidArgumentError(f"adam shape mismatch: params {params.shape}, grad {gradient.shape}, state {state.m.shape}")
    step = state.step + 1
    m = state.beta1 * state.m + (1.0 - state.beta1) * gradient
    v = state.beta2 * state.v + (1.0 - state.beta2) * (gradient * gradient)
    m_hat = m / (1.0 - state.beta1 ** step)
    v_hat = v / (1.0 - state.beta2 ** step)
    new_params = params - lr * (m_hat / (np.sqrt(v_hat) + state.eps))
    return replace(state, m=m, v=v, step=step), new_params


def cosine_lr(step: int, total_steps: int, lr0: float) -> float:
    """lr0 * (1 + cos(pi * step / total)) / 2."""
    if total_steps <= 0:
        return lr0
    if not 0 <= step <= total_steps:
        raise InvalidArgumentError(f"step {step} outside [0, {total_steps}]")
    if 2 * step == total_steps:
        return lr0 / 2.0
    return lr0 * 0.5 * (1.0 + math.cos(math.pi * step / total_steps))


def save_optimizer(state: OptimizerState, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as fh:
        np.savez(fh, m=state.m, v=state.v, step=np.array(state.step),
                 betas=np.array([state.beta1, state.beta2, state.eps]))
    return path


def load_optimizer(path: Union[str, Path]) -> OptimizerState:
    path = Path(path)
    try:
        with np.load(path) as blob:
            beta1, beta2, eps = (float(v) for v in blob["betas"])
            return OptimizerState(blob["m"].copy(), blob["v"].copy(), int(blob["step"]), beta1, beta2, eps)
    except (KeyError, ValueError, OSError) as exc:
        raise ParseError(f"unreadable optimizer state: {exc}", path=str(path))
