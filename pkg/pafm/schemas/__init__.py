# Import all schemas here for easy access
from .common import StrictModel, CommandResult, ErrorReport, PhaseTiming, TimingReport
from .dataset import DatasetFamily, SyntheticSpec
from .training import Objective, Provider, ModelConfig, TrainConfig
from .evaluation import EvalConfig, SparsityConfig
from .experiment import ExperimentConfig

__all__ = [
    # Common schemas
    "StrictModel",
    "CommandResult",
    "ErrorReport",
    "PhaseTiming",
    "TimingReport",

    # Dataset schemas
    "DatasetFamily",
    "SyntheticSpec",

    # Training schemas
    "Objective",
    "Provider",
    "ModelConfig",
    "TrainConfig",

    # Evaluation schemas
    "EvalConfig",
    "SparsityConfig",

    # Experiment
    "ExperimentConfig",
]
