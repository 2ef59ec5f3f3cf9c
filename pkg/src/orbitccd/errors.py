"""Exception types raised by orbitccd."""


class OrbitCCDError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateMass(OrbitCCDError, ValueError):
    """The mass distribution has a rank deficient central inertia."""


class NonPositiveWeight(OrbitCCDError, ValueError):
    """A mass or control weight is zero or negative."""


class ParameterOutOfDomain(OrbitCCDError, ValueError):
    pass


class SingularDisplacement(OrbitCCDError, ValueError):
    """The linear part of an affine displacement is not invertible."""


class ArcTooLong(OrbitCCDError, ValueError):
    pass


class BallTooLarge(OrbitCCDError):
    """Orbit of an edge or face is not a hyperboloid at this ball radius.

    The detector reacts by subdividing the motion.
    """


class ValidationError(OrbitCCDError, ValueError):
    pass


class NonSimplePolygon(ValidationError):
    pass


class ParseError(OrbitCCDError, ValueError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at {position})"
        super().__init__(message)
