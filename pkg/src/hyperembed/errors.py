"""Exception hierarchy shared across the package.

The CLI maps each family onto an exit code, so new errors should subclass
one of the families below rather than ``HyperembedError`` directly.
"""


class HyperembedError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(HyperembedError, ValueError):
    exit_code = 2


class ParseError(ConfigError):
    """Malformed input file; message carries the path and line number."""


class CardinalityError(ConfigError):
    pass


class InvalidWeightError(ConfigError):
    pass


class AssumptionViolation(HyperembedError):
    """The binarized Laplacian graph is disconnected."""

    exit_code = 3

    def __init__(self, message, components=None):
        super().__init__(message)
        self.components = components or []


class GenerationError(AssumptionViolation):
    """No connected sample was drawn within the attempt budget."""


class SplitError(AssumptionViolation):
    pass


class NumericalError(HyperembedError):
    exit_code = 4


class InsufficientSpectrumError(NumericalError):
    pass


class UndefinedMetricError(NumericalError):
    pass
