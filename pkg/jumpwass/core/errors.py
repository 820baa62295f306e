"""
Exception hierarchy for jumpwass.

Each invariant violation gets its own class. Classes also derive from the
closest builtin so callers may catch either.
"""
from typing import Optional


class JumpwassError(Exception):
    """Base class for every error raised by the package"""

    invariant: str = "unspecified"

    def __init__(self, message: str, invariant: Optional[str] = None):
        super().__init__(message)
        if invariant is not None:
            self.invariant = invariant


class EmptyModeSetError(JumpwassError, ValueError):
    invariant = "non-empty mode set"


class DimensionMismatchError(JumpwassError, ValueError):
    invariant = "dimension agreement"


class NonFiniteEntryError(JumpwassError, ValueError):
    invariant = "finite entries"


class ProbabilityVectorError(JumpwassError, ValueError):
    invariant = "probability vector"


class TransitionMatrixError(JumpwassError, ValueError):
    invariant = "row-stochastic transition matrix"


class ScheduleExhaustedError(JumpwassError, IndexError):
    invariant = "time index within schedule horizon"


class NotPositiveSemidefiniteError(JumpwassError, ValueError):
    invariant = "positive semidefinite covariance"


class ComponentCapExceededError(JumpwassError, ValueError):
    invariant = "enumeration component cap"

    def __init__(self, required_components: int, cap: int, required_bytes: int):
        super().__init__(
            f"Enumeration needs {required_components} components "
            f"(~{required_bytes / 2 ** 20:.1f} MiB) but the cap is {cap}; "
            f"raise the component cap explicitly or lower the horizon"
        )
        self.required_components = required_components
        self.cap = cap
        self.required_bytes = required_bytes


class LawKindError(JumpwassError, ValueError):
    invariant = "switching law kind"


class InsufficientSamplesError(JumpwassError, ValueError):
    invariant = "at least two samples"


class HorizonMismatchError(JumpwassError, ValueError):
    invariant = "matching horizons"


class ConfigError(JumpwassError, ValueError):
    """Invalid analysis config: parse failure or schema/invariant violation"""

    invariant = "valid analysis config"

    def __init__(
        self,
        message: str,
        field_path: Optional[str] = None,
        line: Optional[int] = None,
        column: Optional[int] = None,
    ):
        super().__init__(message)
        self.field_path = field_path
        self.line = line
        self.column = column


class EngineError(JumpwassError, RuntimeError):
    """An engine failed during run_analysis; wraps the original error"""

    invariant = "engine run"

    def __init__(self, engine: str, cause: Exception):
        super().__init__(f"engine '{engine}' failed: {cause}")
        self.engine = engine
        self.cause = cause
