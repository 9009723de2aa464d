# Exception hierarchy for the curved n-body toolkit
# Each exception carries the exit code the command line reports for it


class NBodyError(Exception):
    """Base class for all toolkit errors"""
    exit_code = 1

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class ValidationError(NBodyError, ValueError):
    """Invalid input: bad shapes, out-of-range values, unusable configurations"""
    exit_code = 2


class InfeasibleRadiusError(ValidationError):
    """Radius larger than 1 requested on the sphere"""


class InvalidConfigurationError(ValidationError):
    """Configuration or state violates a manifold or tangency constraint"""


class UndeterminedAngularVelocityError(ValidationError):
    """The angular-velocity balance needs a nonzero trailing block"""


class ConfigValidationError(ValidationError):
    """
    Raised by the configuration parser with every violation found

    Args:
        violations (list): Human readable violation messages
    """
    def __init__(self, violations):
        self.violations = list(violations)
        message = "invalid configuration:\n" + "\n".join(f"  - {v}" for v in self.violations)
        super().__init__(message)


class SingularityError(NBodyError, ArithmeticError):
    """
    A pair of bodies hit a singular denominator (collision or antipodal pair)

    Args:
        message (str): Description of the singularity
        pair (tuple): 0-based indices of the offending bodies
        time (float): Simulation time, when raised during integration
    """
    exit_code = 3

    def __init__(self, message, pair=None, time=None):
        super().__init__(message, time=time)
        self.pair = pair


class NumericalFailureError(NBodyError, ArithmeticError):
    """Integration produced non-finite values"""
    exit_code = 3


class InvariantViolationError(NBodyError):
    """A probe found a record breaking a property that must always hold"""
    exit_code = 3


class NonConvergenceError(NBodyError):
    """The equilibrium solver found no root"""
    exit_code = 4


class CatalogIOError(NBodyError):
    """A catalog or output file could not be read or written"""
    exit_code = 5


class CatalogParseError(CatalogIOError):
    """A catalog line is not a valid record"""

    def __init__(self, message, line_number):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number
