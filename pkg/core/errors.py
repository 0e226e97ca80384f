"""Exception hierarchy for hecke-product.

Every error raised by the library derives from HeckeError. The CLI maps the
groups onto exit codes: hypothesis/config violations exit 2, certification
failures exit 3.
"""


class HeckeError(Exception):
    """Base class for all library errors."""


class HypothesisError(HeckeError, ValueError):
    """A precondition or hypothesis of the product formula is violated.

    The message always names the violated inequality.
    """

    def __init__(self, inequality: str, detail: str = ""):
        self.inequality = inequality
        message = f"hypothesis violated: {inequality}"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)


class ConfigError(HeckeError, ValueError):
    """A run configuration could not be parsed."""


class CapacityError(HeckeError, IndexError):
    """Coefficient table accessed beyond its capacity."""


class CoefficientOverflowError(HeckeError, OverflowError):
    """An exact coefficient does not fit the requested fixed-width type."""


class PoleError(HeckeError, ValueError):
    """Evaluation at, or within the exclusion radius of, a pole."""


class PrecisionExhaustedError(HeckeError, ArithmeticError):
    """Series cancellation exceeds the working precision."""

    def __init__(self, message: str, cancellation: float = float("inf")):
        self.cancellation = cancellation
        super().__init__(message)


class ConvergenceError(HeckeError, RuntimeError):
    """An iteration did not converge within its bound."""


class CertificationError(HeckeError, RuntimeError):
    """A tail or discretisation estimate exceeds the requested tolerance."""

    def __init__(self, message: str, estimate: float = float("inf"), tol: float = 0.0):
        self.estimate = estimate
        self.tol = tol
        super().__init__(message)


class TruncationError(CertificationError):
    """A truncated sum could not be certified within its term cap."""


class QuadratureError(CertificationError):
    """A contour quadrature could not be certified."""


class DifferentiationError(CertificationError):
    """A finite-difference derivative estimate exceeds its tolerance."""
