"""Exception hierarchy shared by all modules."""


class NearFieldError(Exception):
    """Base class for every error raised by the package."""


class DomainError(NearFieldError, ValueError):
    """An argument lies outside the physical domain of an operation."""


class UnsupportedMaterialError(NearFieldError, TypeError):
    """The operation has no meaning for the given material variant."""


class SingularityError(NearFieldError, ArithmeticError):
    """Evaluation requested exactly at a pole of a kernel."""


class DivergenceError(NearFieldError, ArithmeticError):
    """The requested quantity is infinite (for example S_e at d = 0)."""


class ResolutionError(NearFieldError, ArithmeticError):
    """A sampled representation cannot resolve the requested frequency."""


class QuadratureError(NearFieldError, ArithmeticError):
    """Adaptive quadrature did not reach its tolerance.

    Attributes
    ----------
    value : float
        Best available estimate of the integral.
    error : float
        Error estimate attached to ``value``.
    """

    def __init__(self, message, value=float("nan"), error=float("inf")):
        super().__init__(message)
        self.value = value
        self.error = error
