# Import all models here for easy access
from .dataset import UNCONDITIONAL, Dataset, CandidatePool, CandidateTable, table_from_pools, table_from_rows, owner_only_table
from .mlp import TimeEmbedding, MlpModel, time_embed, parameter_count, init_model, forward, forward_batch, backward, weighted_sum_backward
from .checkpoint import save_checkpoint, load_checkpoint

__all__ = [
    "UNCONDITIONAL",
    "Dataset",
    "CandidatePool",
    "CandidateTable",
    "table_from_pools",
    "table_from_rows",
    "owner_only_table",
    "TimeEmbedding",
    "MlpModel",
    "time_embed",
    "parameter_count",
    "init_model",
    "forward",
    "forward_batch",
    "backward",
    "weighted_sum_backward",
    "save_checkpoint",
    "load_checkpoint",
]
