"""
Error types for sdwbound
Every error carries the process exit code the CLI reports for it
"""


class SdwBoundError(Exception):
    """Base class for all sdwbound failures"""

    exit_code = 1


class ParameterDomainError(SdwBoundError, ValueError):
    """A physical or numerical parameter lies outside its admissible range"""

    exit_code = 1


class ConfigError(SdwBoundError):
    """Unknown key or unparsable value in a configuration file"""

    exit_code = 1


class SchemaError(SdwBoundError):
    """A CSV input does not match the schema its consumer expects"""

    exit_code = 1


class QuadratureError(SdwBoundError):
    """A quadrature did not reach its target accuracy"""

    exit_code = 2

    def __init__(self, message, estimate=None, value=None):
        super().__init__(message)
        self.estimate = estimate
        self.value = value


class NonConvergenceError(SdwBoundError):
    """The fixed-point iteration ran out of iterations"""

    exit_code = 2

    def __init__(self, message, iterations=None, residual=None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class NumericalConsistencyError(SdwBoundError):
    """A property that holds exactly in theory was violated numerically"""

    exit_code = 2


class OptimizationDomainError(SdwBoundError):
    """No interior minimum of the total energy could be bracketed"""

    exit_code = 2

    def __init__(self, message, samples=None):
        super().__init__(message)
        self.samples = list(samples or [])
