"""Exception hierarchy.

Three families are distinguished because the command line maps them to
different exit codes: invalid or unphysical input and regime violations
(exit 2), and numerical failures (exit 3).
"""


class WignerClassError(Exception):
    """Base class for all errors raised by this package."""


class InvalidState(WignerClassError, ValueError):
    """The supplied matrix does not describe a physical Gaussian state."""


class NotPositive(InvalidState):
    pass


class UncertaintyViolated(InvalidState):
    pass


class RegimeError(WignerClassError):
    """The requested quantity is not an ordinary function for this state."""


class DistributionValued(RegimeError):
    pass


class Marginal(RegimeError):
    pass


class VacuumDegenerate(RegimeError):
    pass


class NumericalError(WignerClassError, ArithmeticError):
    """A numerical procedure failed to deliver a trustworthy value."""


class NonConvergence(NumericalError):
    pass


class HypergeometricDivergence(NumericalError):
    """Raised when 2F1 is requested too close to its singular point z = 1."""


class OverflowSignal(NumericalError, OverflowError):
    pass


class Inconclusive(NumericalError):
    pass
