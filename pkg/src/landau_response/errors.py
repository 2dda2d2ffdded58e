"""Exception and warning types shared across the package."""


class InvalidParameterError(ValueError):
    """A physical or numerical parameter is outside its admissible range."""


class DomainError(ValueError):
    """A quantity was requested at a point where it is undefined."""


class UnsupportedSpectrumError(NotImplementedError):
    """The field has no closed-form Fourier transform."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance.

    Attributes:
        estimate: the achieved (absolute) error estimate when the subdivision
            budget ran out.
        value: the best available approximation of the integral.
    """

    def __init__(self, message, estimate=float("nan"), value=None):
        super().__init__(f"{message} (achieved error estimate {estimate:.3e})")
        self.estimate = estimate
        self.value = value


class TruncationWarning(UserWarning):
    """A finite window or truncated integration range cut off non-negligible mass."""
