"""Partitioned least squares regression.

Features are split into groups; the fitted model gives every group a signed
weight and every feature a nonnegative share of its group's weight.
"""

__version__ = "0.1.0"

from .alt import AltTrace, fit_alt
from .bnb import fit_bnb
from .errors import (
    CapExceededError,
    DimensionError,
    IterationLimitError,
    PartLSError,
    SolverError,
    ValidationError,
)
from .instances import SubsetSumInstance, gen_random, gen_subset_sum
from .linalg import mixed_sign_ls, nnls_solve, ols_solve
from .model import (
    Dataset,
    FitConfig,
    FitReport,
    Model,
    Partition,
    RawSolution,
    objective,
    predict,
    renormalize,
    to_homogeneous,
    validate,
)
from .opt import fit_opt

__all__ = [
    "AltTrace",
    "CapExceededError",
    "Dataset",
    "DimensionError",
    "FitConfig",
    "FitReport",
    "IterationLimitError",
    "Model",
    "Partition",
    "PartLSError",
    "RawSolution",
    "SolverError",
    "SubsetSumInstance",
    "ValidationError",
    "fit_alt",
    "fit_bnb",
    "fit_opt",
    "gen_random",
    "gen_subset_sum",
    "mixed_sign_ls",
    "nnls_solve",
    "objective",
    "ols_solve",
    "predict",
    "renormalize",
    "to_homogeneous",
    "validate",
]
