"""Exception hierarchy shared across the package."""


class ShrinkToriError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateJetError(ShrinkToriError):
    """The tangent vectors of a jet fail to span a plane."""


class NotLagrangianError(ShrinkToriError):
    """A Lagrangian-only quantity was requested on a non-Lagrangian surface."""


class NotSphericalError(ShrinkToriError):
    """The point does not lie on the sphere of radius sqrt(2)."""


class GridMismatchError(ShrinkToriError):
    """A field does not live on the grid it is combined with."""


class AperiodicInputError(ShrinkToriError):
    """An immersion does not close up over the grid periods."""


class InconsistentSamplingError(ShrinkToriError):
    """Total curvature does not yield an integer genus."""


class InadmissibleParameterError(ShrinkToriError, ValueError):
    """Family parameters fall outside their admissible set."""


class InconsistentInitialDataError(ShrinkToriError, ValueError):
    """Initial curve data does not match the conserved constant."""


class IntegratorError(ShrinkToriError):
    """The ODE integration failed or drifted off its first integral."""


class CircleDegenerateError(ShrinkToriError):
    """The profile curve is a circle, so the radius has no oscillation."""


class ShootingError(ShrinkToriError):
    """Root finding on the conserved constant failed."""
