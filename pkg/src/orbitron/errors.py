class OrbitronError(Exception):
    """Base class for all package errors."""


class NotAntisymmetric(OrbitronError, ValueError):
    pass


class PoleSingularity(OrbitronError, ArithmeticError):
    pass


class SignConstraint(OrbitronError, ValueError):
    pass


class DegenerateVelocity(OrbitronError, ValueError):
    pass


class NotCritical(OrbitronError, ValueError):
    pass


class NotCanonical(OrbitronError, ValueError):
    pass


class ComplementDegenerate(OrbitronError, ArithmeticError):
    pass


class EigenFailure(OrbitronError, ArithmeticError):
    pass


class MissingColumns(OrbitronError, ValueError):
    pass


class ScenarioError(OrbitronError, ValueError):
    """Raised for malformed scenario files; maps to exit code 2."""
