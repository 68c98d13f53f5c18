"""Exception hierarchy shared by every zmlab module."""


class ZmlabError(Exception):
    """Base class for computation failures (CLI exit code 1)."""


class PoleError(ZmlabError, ValueError):
    """Evaluation requested at or too close to a pole."""


class PrecisionError(ZmlabError):
    """The requested error budget cannot be met in the supported window."""


class QuadratureError(ZmlabError):
    """A quadrature or contour integral failed to converge."""


class CoverageError(ZmlabError):
    """The zero cache does not cover the requested ordinate window."""


class ZeroCountMismatch(ZmlabError):
    """Sign-change count disagrees with the Riemann-von Mangoldt count."""

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class ArgumentTrackingError(ZmlabError):
    """Continuous variation of arg zeta is ill-defined (path too close to a zero)."""


class CertificationError(ZmlabError):
    """Winding-number certificate refused."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
