from pydantic import Field, model_validator
from typing import Optional
from enum import Enum

from pafm.schemas.common import StrictModel


class Objective(str, Enum):
    FM = "FM"
    PAFM = "PAFM"


class Provider(str, Enum):
    full = "full"
    knn = "knn"
    perturbation = "perturbation"
    augmentation = "augmentation"
    shortlist = "shortlist"


class ModelConfig(StrictModel):
    hidden: int = Field(128, ge=1)
    embed_width: int = Field(32, ge=2)
    layers: int = Field(4, ge=1)
    omega_max: float = Field(314.1592653589793, gt=0.0)  # 2*pi*50

    @model_validator(mode="after")
    def _even_embedding(self):
        if self.embed_width % 2:
            raise ValueError("embed_width must be even")
        return self


class TrainConfig(StrictModel):
    objective: Objective = Objective.PAFM
    provider: Provider = Provider.full
    K: int = Field(16, ge=1)
    steps: int = Field(50_000, ge=0)
    batch_size: int = Field(256, ge=1)
    lr0: float = Field(5e-4, gt=0.0)
    seed: Optional[int] = None
    t_eps: float = Field(1e-4, gt=0.0, lt=1.0)
    sigma: float = Field(0.05, ge=0.0)
    augment_scale: float = Field(1.0, ge=0.0)
    shortlist_m: int = Field(128, ge=1)
    conditioned: bool = False
    eval_every: int = Field(500, ge=1)
    checkpoint_every: int = Field(5_000, ge=1)
    audit_every: int = Field(100, ge=0)   # 0 disables the weighted/collapsed gradient audit
