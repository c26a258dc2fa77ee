"""Exception hierarchy.

Two families: coefficient validation rejections (bad user input, CLI exit
code 2) and numerical failures raised while evaluating or integrating
(CLI exit code 3).
"""


class RlwsError(Exception):
    """Base class for all library errors."""


class ValidationError(RlwsError):
    """Rejected coefficient triple."""


class RejectZeroA(ValidationError):
    """a == 0 is outside the analyzed family."""


class RejectZeroB(ValidationError):
    """b == 0 is outside the analyzed family."""


class RejectNegativeA(ValidationError):
    """a < 0 after sign normalization is not handled."""


class RejectZeroDiscriminant(ValidationError):
    """a^2 + 4bc == 0 is excluded."""


class NumericalError(RlwsError):
    """Failure while evaluating or integrating."""


class DomainViolation(NumericalError):
    """Phase point lies outside the half-disk domain."""


class BoundarySingularity(NumericalError):
    """Evaluation requested on the unit circle where 1/w blows up."""


class AxisSingularity(NumericalError):
    """Evaluation requested at x ~ 0 where -w/x blows up."""


class SingularDenominator(NumericalError):
    """a*x - 2*b*w ~ 0: the profile acceleration is unbounded."""


class UnboundedCurvature(NumericalError):
    """Second principal curvature flagged unbounded."""


class StallAtCriticalPoint(NumericalError):
    """Level-curve tracing stopped on a vanishing gradient."""


class StepBudgetExhausted(NumericalError):
    """Tracing ran out of steps before closing or leaving the domain."""


class InvalidStart(NumericalError):
    """Start point too far from the requested level set."""


class NumericalDivergence(NumericalError):
    """Adaptive step size underflowed away from any detectable event."""


class InsufficientSamples(NumericalError):
    """Orbit too short for the requested statistic."""


class EmptyOrbit(NumericalError):
    """Mesh construction from an orbit without samples."""


class PoleOnSurface(NumericalError):
    """Stereographic pole too close to a mesh vertex."""


class BoundaryContact(NumericalError):
    """Rotation-angle quadrature hit x ~ 1 where 1/(1-x^2) blows up."""
