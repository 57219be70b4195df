"""Exceptions raised by the package.

Every error derives from 'RevsError' so callers can catch the package as a
whole. The CLI maps each class to an exit code (see 'revs.app.main').
"""


class RevsError(Exception):

    """Base class for all package errors."""


class DataError(RevsError):

    """Input data cannot be parsed or violates a model invariant."""


class StructuralError(DataError):

    """The network is not a tree rooted at the substation."""


class InfeasibleScheduleError(DataError):

    """An EV specification or charging schedule violates the EV model."""


class DimensionError(RevsError, ValueError):

    """Array shapes do not agree."""


class InstanceTooLargeError(RevsError):

    """An enumeration oracle was asked to search beyond its bound."""


class ModelBlowUpError(RevsError):

    """Linearized voltages left the physically meaningful range."""


class SolverError(RevsError):

    """An iterative solver stopped before reaching its tolerances.

    Attributes:
        residuals: Mapping of residual name to its value at termination.
    """

    def __init__(self, message, residuals = None):
        super().__init__(message)
        self.residuals = dict(residuals or {})


    def __str__(self):
        text = super().__str__()
        if self.residuals:
            details = ", ".join(
                f"{name}={value:.3e}" for name, value in sorted(self.residuals.items())
            )
            text = f"{text} ({details})"
        return text
