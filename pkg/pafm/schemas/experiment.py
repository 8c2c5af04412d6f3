from pydantic import Field
from typing import Optional

from pafm.schemas.common import StrictModel
from pafm.schemas.dataset import SyntheticSpec
from pafm.schemas.evaluation import EvalConfig, SparsityConfig
from pafm.schemas.training import ModelConfig, TrainConfig


class ExperimentConfig(StrictModel):
    """Every knob of every module. Defaults reproduce the crescent protocol."""
    seed: int = 0
    output_dir: Optional[str] = None
    dataset: SyntheticSpec = Field(default_factory=SyntheticSpec)
    model: ModelConfig = Field(default_factory=ModelConfig)
    training: TrainConfig = Field(default_factory=TrainConfig)
    evaluation: EvalConfig = Field(default_factory=EvalConfig)
    sparsity: SparsityConfig = Field(default_factory=SparsityConfig)

    def resolved(self) -> "ExperimentConfig":
        """Copy with per-section seeds filled from the top-level seed."""
        out = self.model_copy(deep=True)
        if out.dataset.seed is None:
            out.dataset.seed = out.seed
        if out.training.seed is None:
            out.training.seed = out.seed
        return out
