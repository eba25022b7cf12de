"""Exception hierarchy shared by all modules.

Each class carries the CLI exit code it maps to.
"""


class DispatchError(Exception):
    exit_code = 4


class DomainError(DispatchError, ValueError):
    """An argument is outside the mathematical domain of an operation."""

    exit_code = 2


class ConfigError(DispatchError, ValueError):
    exit_code = 2


class DataError(DispatchError, ValueError):
    exit_code = 3


class InfeasibleError(DispatchError):
    exit_code = 1


class SolverError(DispatchError, RuntimeError):
    """Numerical breakdown inside the simplex; ``diagnostics`` holds solver state."""

    exit_code = 4

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ResourceError(DispatchError, RuntimeError):
    """Node or iteration limit hit. Carries the best incumbent and bound found."""

    exit_code = 4

    def __init__(self, message, incumbent=None, bound=None):
        super().__init__(message)
        self.incumbent = incumbent
        self.bound = bound


class UnsupportedError(DispatchError, TypeError):
    exit_code = 4


class ConsistencyError(DispatchError, AssertionError):
    """Recomputed quantities disagree with the optimizer; indicates a formulation bug."""

    exit_code = 4
