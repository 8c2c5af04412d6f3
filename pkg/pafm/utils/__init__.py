# Import all utilities here for easy access
from .numeric import dot, axpy, matvec, log_sum_exp, log_normalize
from .rng import SeededRng, gaussian_sample, gaussian_batch

__all__ = [
    "dot",
    "axpy",
    "matvec",
    "log_sum_exp",
    "log_normalize",
    "SeededRng",
    "gaussian_sample",
    "gaussian_batch",
]
