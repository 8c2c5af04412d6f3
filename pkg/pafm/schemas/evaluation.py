from pydantic import Field
from typing import List, Optional

from pafm.schemas.common import StrictModel


class EvalConfig(StrictModel):
    grid_points: int = Field(4096, ge=1)
    grid_times: int = Field(16, ge=1)
    field_t_min: float = Field(0.1, gt=0.0, lt=1.0)   # grid times are cell midpoints in [field_t_min, 1)
    eval_seed: int = 12345
    n_samples: int = Field(5000, ge=1)
    euler_steps: int = Field(300, ge=1)
    kde_bandwidth: Optional[float] = Field(None, gt=0.0)   # None = Scott's rule
    grad_var_batches: int = Field(500, ge=2)
    grad_var_batch_size: int = Field(256, ge=1)
    grad_var_frozen: bool = False
    moving_average: int = Field(100, ge=1)
    truth_samples: int = Field(5000, ge=1)


class SparsityConfig(StrictModel):
    n_values: List[int] = [100, 200, 500, 1000]
    steps: int = Field(15_000, ge=1)
