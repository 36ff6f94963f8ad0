"""Exception hierarchy shared by every qzeno module."""


class QZenoError(Exception):
    """Base class for all library errors."""


class NonHermitianInput(QZenoError, ValueError):
    pass


class DimensionMismatch(QZenoError, ValueError):
    pass


class NotNormalized(QZenoError, ValueError):
    pass


class InvalidDensity(QZenoError, ValueError):
    pass


class NegativeRate(QZenoError, ValueError):
    pass


class InvalidProjectorSet(QZenoError, ValueError):
    pass


class StrengthOutOfRange(QZenoError, ValueError):
    pass


class NonUnitaryKick(QZenoError, ValueError):
    pass


class DegenerateOutcome(QZenoError, ValueError):
    pass


class EmptySubspace(QZenoError, ValueError):
    pass


class FullSubspace(QZenoError, ValueError):
    pass


class IndexOutOfRange(QZenoError, IndexError):
    pass


class InvalidCount(QZenoError, ValueError):
    pass


class InvalidDuration(QZenoError, ValueError):
    pass


class InvalidSchedule(QZenoError, ValueError):
    pass


class ObjectiveEvaluationFailed(QZenoError, RuntimeError):
    pass


class ConfigInvalid(QZenoError, ValueError):
    """A scenario or CLI config failed validation.

    ``field`` names the offending entry (dotted path) so callers can report it.
    """

    def __init__(self, field, message):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")


class SimulationError(QZenoError, RuntimeError):
    """Numerical failure inside an engine run."""


class TraceDriftExceeded(SimulationError):
    """Integrator output left the valid density-matrix set.

    Raised when |Tr(rho) - 1| exceeds the configured limit, or when Hermiticity
    or positivity is lost; both indicate a step size that is too coarse.
    """


class RecurrenceWarning(UserWarning):
    """Reservoir horizon exceeds the discrete-mode recurrence time."""
