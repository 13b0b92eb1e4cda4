"""Exception hierarchy shared by the solvers and the command line."""


class PartLSError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(PartLSError, ValueError):
    """Array shapes are inconsistent, or inputs contain non-finite values."""


class ValidationError(PartLSError, ValueError):
    """A partition, dataset or configuration violates its invariants."""


class IterationLimitError(PartLSError, RuntimeError):
    """An iterative kernel hit its iteration cap, usually from ill-conditioning."""


class SolverError(PartLSError, RuntimeError):
    """Every candidate subproblem of a solver failed."""


class CapExceededError(PartLSError, RuntimeError):
    """The enumeration or node cap was exceeded before a solution was found."""
