"""Exception types shared across the package."""


class WillmoreError(Exception):
    """Base class for all package errors."""


class IllConditionedRoots(WillmoreError):
    """Root finding on a polynomial failed to reach the requested residual."""


class LogarithmicObstruction(WillmoreError):
    """A rational antiderivative does not exist: some finite pole carries a
    nonzero residue, which would produce a logarithmic term."""

    def __init__(self, pole, residue):
        self.pole = pole
        self.residue = residue
        super().__init__(f"residue {residue} at pole {pole} obstructs a rational antiderivative")


class NullConditionViolated(WillmoreError):
    """phi1^2 + phi2^2 + phi3^2 is not identically zero."""

    def __init__(self, max_residual):
        self.max_residual = max_residual
        super().__init__(f"conformality (null) condition fails, residual {max_residual:.3e}")


class NonSimplePole(WillmoreError):
    """An end of the meromorphic map has a pole of order larger than one."""

    def __init__(self, location, order=None):
        self.location = location
        self.order = order
        super().__init__(f"pole at {location} has order {order}, expected simple")


class ZeroResidueEnd(WillmoreError):
    """A puncture where the residue vector of the map vanishes."""

    def __init__(self, location):
        self.location = location
        super().__init__(f"vanishing residue vector at {location}")


class QuadratureNotConverged(WillmoreError):
    def __init__(self, estimate, error):
        self.estimate = estimate
        self.error = error
        super().__init__(f"quadrature stalled at {estimate} with error estimate {error:.3e}")


class PoleProximity(WillmoreError):
    """Evaluation point too close to a pole of the map."""


class OriginOnSurface(WillmoreError):
    """Inversion requested but the surface passes through (or too near) the origin."""


class DegenerateMetric(WillmoreError):
    """First fundamental form numerically degenerate at the evaluation point."""


class NoConvergence(WillmoreError):
    """Regularized values failed to settle along the radius schedule."""

    def __init__(self, spread):
        self.spread = spread
        super().__init__(f"regularized sequence spread {spread:.3e} exceeds tolerance")


class ImmersionLost(WillmoreError):
    """A perturbed surface stopped being an immersion at the given step."""

    def __init__(self, step):
        self.step = step
        super().__init__(f"normal graph ceases to be an immersion at step {step}")


class GramIllConditioned(WillmoreError):
    """Test basis Gram matrix too ill-conditioned for a reliable eigensolve."""


class ConfigError(WillmoreError):
    """Run configuration failed validation."""
