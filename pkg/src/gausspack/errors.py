"""Exception hierarchy for gausspack."""


class GausspackError(Exception):
    """Base class for all library errors."""


class ParameterError(GausspackError, ValueError):
    """Invalid model or physical parameter."""


class ModelEvaluationError(GausspackError, ArithmeticError):
    """A coefficient model produced a non-finite value."""


class InvalidPointError(GausspackError, ValueError):
    """A chart point violates its chart constraint beyond tolerance."""


class InvalidStateError(InvalidPointError):
    """Second moments violate the Robertson-Schroedinger equality."""


class SingularChartError(GausspackError):
    """The requested chart is singular at the given point."""


class UnsupportedConversionError(GausspackError):
    """No chart map exists from the source chart to the target chart."""


class NotApplicableError(GausspackError):
    """Operation undefined in the current parameter regime."""


class GridMismatchError(GausspackError, ValueError):
    """Two trajectories that must share a time grid do not."""


class CoverageError(GausspackError):
    """A spatial grid does not cover the wave packet adequately."""


class IntegrationError(GausspackError):
    """Numerical integration failed; carries the last good time and state."""

    def __init__(self, message, t_last=None, y_last=None):
        super().__init__(message)
        self.t_last = t_last
        self.y_last = y_last


class RiccatiBlowUpError(IntegrationError):
    """A Riccati solution escaped to infinity in finite time."""

    def __init__(self, message, t_singular, t_last=None, y_last=None):
        super().__init__(message, t_last=t_last, y_last=y_last)
        self.t_singular = t_singular


class OracleMismatchError(GausspackError):
    """A closed-form oracle disagrees with its defining ODE."""

    def __init__(self, message, analytic=None, numeric=None, residual=None):
        super().__init__(message)
        self.analytic = analytic
        self.numeric = numeric
        self.residual = residual


class ConfigError(GausspackError):
    """Malformed run configuration."""

    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field
