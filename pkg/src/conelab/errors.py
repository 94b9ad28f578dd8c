"""Exception types shared across the package."""


class DomainError(ValueError):
    """A parameter lies outside the operation's mathematical domain."""


class CollisionError(DomainError):
    """Evaluation at (or too close to) the force center |q| = 0."""


class CylinderCaseError(DomainError):
    """Exponent 2 potentials have cylinder geometry, not a cone."""


class EmptyHillError(DomainError):
    """No radius satisfies V_eff(r) <= E for the given (E, J)."""


class OutsideHillError(DomainError):
    """Point has V(q) > E, outside the allowed region at this energy."""


class NotEmbeddableError(DomainError):
    """Cone parameter c >= 1 has no rotational embedding in 3-space."""


class OriginCrossingError(ValueError):
    """A curve passes too close to the origin for branch continuation."""


class UnderSampledError(ValueError):
    """Samples are too sparse for unambiguous unwrapping or differencing."""


class StepUnderflowError(RuntimeError):
    """Adaptive step size collapsed away from any collision."""


class DriftBudgetError(RuntimeError):
    """Conserved-quantity drift exceeded the integration's declared budget."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested accuracy."""

    def __init__(self, message: str, estimate: float = float("nan")):
        super().__init__(message)
        self.estimate = estimate
