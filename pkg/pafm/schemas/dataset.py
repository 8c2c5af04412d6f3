from pydantic import Field, model_validator
from typing import List, Optional
from enum import Enum

from pafm.schemas.common import StrictModel


class DatasetFamily(str, Enum):
    two_moons = "two_moons"
    gaussian_mixture = "gaussian_mixture"


class SyntheticSpec(StrictModel):
    family: DatasetFamily = DatasetFamily.two_moons
    n_per_class: int = Field(1000, ge=1)
    noise_std: float = Field(0.05, ge=0.0)
    # gaussian_mixture only
    centers: List[List[float]] = [[-5.0, 0.0], [5.0, 0.0]]
    center_stds: List[float] = [0.1, 0.1]
    # source distribution the flow transports from; shifted away from the moons
    source_mean: List[float] = [0.0, 3.0]
    source_std: float = Field(0.1, gt=0.0)
    # optional class-balanced subsample applied after generation
    n_total: Optional[int] = Field(None, ge=1)
    seed: Optional[int] = None

    @model_validator(mode="after")
    def _check_mixture(self):
        if self.family == DatasetFamily.gaussian_mixture:
            if len(self.centers) != len(self.center_stds) or not self.centers:
                raise ValueError("centers and center_stds must be non-empty and the same length")
            dims = {len(c) for c in self.centers}
            if len(dims) != 1:
                raise ValueError("all mixture centers must share one dimension")
        return self

    @property
    def dimension(self) -> int:
        return 2 if self.family == DatasetFamily.two_moons else len(self.centers[0])
