"""Exception hierarchy.

Errors split into two families so the CLI can map them to exit codes:
``ModelViolation`` (a computed quantity contradicts a structural property that
must hold) and ``NumericalFailure`` (the numerics could not deliver the
requested accuracy).
"""


class SpectrumError(Exception):
    """Base class for all library errors."""


class DomainError(SpectrumError, ValueError):
    """Input outside the domain of an operation."""


class ConfigurationError(SpectrumError, ValueError):
    """Invalid numerical configuration (e.g. truncation order too small)."""


class ModelViolation(SpectrumError):
    """A computed quantity contradicts a property the model guarantees."""


class DegeneracyError(ModelViolation):
    """Two eigenvalues that must be distinct collided within tolerance."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class PropertyViolation(ModelViolation):
    """A band-structure property check failed."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NotFoundError(ModelViolation):
    """A sign change that should bracket a critical point was not found."""


class NumericalFailure(SpectrumError):
    """The numerics failed to reach the requested accuracy."""


class TruncationError(NumericalFailure):
    """A truncated-matrix eigenvalue escaped every localization disc."""


class IntegrationError(NumericalFailure):
    """The ODE integrator failed."""

    def __init__(self, message, lam=None):
        super().__init__(message)
        self.lam = lam


class MissedRootError(NumericalFailure):
    """Root finding found fewer roots than the argument principle counts."""


class SingularityError(NumericalFailure, DomainError):
    """Evaluation too close to a pole."""


class PrecisionError(NumericalFailure):
    """A requested tail/precision target is unreachable."""


class TracingError(NumericalFailure):
    """Band continuation could not resolve a matching ambiguity."""
