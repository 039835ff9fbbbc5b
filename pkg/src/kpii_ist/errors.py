"""Exception hierarchy shared by every module."""


class KPIIError(Exception):
    """Base class for all library errors."""

    exit_code = 3


class SingularCoordinate(KPIIError):
    """The spectral coordinate map degenerates (xi1 = 0)."""


class RealAxisUndefined(KPIIError):
    """A quantity that is discontinuous across Im(lambda) = 0 was requested there."""


class NoContraction(KPIIError):
    def __init__(self, ratio):
        super().__init__(f"fixed-point map does not contract (ratio={ratio:.3g})")
        self.ratio = ratio


class MaxIterExceeded(KPIIError):
    def __init__(self, iterations, residual):
        super().__init__(f"no convergence after {iterations} iterations (residual={residual:.3g})")
        self.iterations = iterations
        self.residual = residual


class StepTooLarge(KPIIError):
    """Richardson check of a finite difference disagrees."""


class InvalidCone(KPIIError):
    """Cone coordinates need x3 < 0."""


class DegeneratePhase(KPIIError):
    """a = 0: stationary points coalesce."""


class DegenerateStationaryPoint(KPIIError):
    """Vanishing second derivative at a stationary point."""


class OutsideAsymptoticRegime(KPIIError):
    """|a| below the regime threshold."""


class ResolutionInsufficient(KPIIError):
    """Quadrature could not resolve the oscillation at the requested accuracy."""


class InnerIntegralNonConvergent(KPIIError):
    """Adaptive panels stalled on the inner representation integral."""


class InsufficientData(KPIIError):
    """Too few samples for a decay fit."""


class CFLViolation(KPIIError):
    """Time step too large for the explicit nonlinear stages."""


class BlowUp(KPIIError):
    """Direct solver amplitude grew by more than the allowed factor."""


class ConfigError(KPIIError):
    exit_code = 2


class FormatError(KPIIError):
    """Malformed or truncated binary file."""

    exit_code = 4
