"""Exception hierarchy."""


class JetcurvError(Exception):
    """Base class for all errors raised by jetcurv."""


class DomainError(JetcurvError, ValueError):
    """Point lies outside the domain of a potential."""


class UnsupportedOrderError(JetcurvError, ValueError):
    """Requested derivative order is not supported."""


class EvaluationError(JetcurvError, ArithmeticError):
    """A black-box potential returned a non-finite value."""


class NotKahlerError(JetcurvError, ValueError):
    """The metric g_{i j-bar} is not positive definite at a point."""


class SingularFormError(JetcurvError, ArithmeticError):
    """A Hermitian matrix that must be invertible is singular."""


class DegenerateFormError(SingularFormError):
    """A Hermitian form has an eigenvalue that is numerically zero."""


class TransportError(JetcurvError, RuntimeError):
    """Parallel transport lost accuracy (Gram drift above tolerance)."""

    def __init__(self, message, suggested_steps=None):
        super().__init__(message)
        self.suggested_steps = suggested_steps


class NotFlatError(JetcurvError, RuntimeError):
    """Chern connection is not flat, so no developing map exists."""


class ConfigError(JetcurvError, ValueError):
    """Invalid CLI configuration or potential file."""
