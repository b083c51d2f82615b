"""Exception types shared across the package."""


class WcolabError(Exception):
    """Base class for all package errors."""


class DomainError(WcolabError, ValueError):
    """Input point or parameter lies outside the operation's domain."""


class UnsupportedOperation(WcolabError, RuntimeError):
    """The requested evaluation is not defined for this function variant."""


class SamplingError(WcolabError, ValueError):
    """Coefficient sampling was requested at an unusable radius."""


class AliasingError(WcolabError, ValueError):
    """DFT length is too short for the requested truncation order."""


class SpecValidationError(WcolabError, ValueError):
    """A function spec document failed structural validation."""


class SelfMapError(WcolabError, ValueError):
    """A symbol failed the disc self-map gate.

    Carries the largest modulus found and the sample point where it occurred.
    """

    def __init__(self, message, max_modulus=None, argmax=None):
        super().__init__(message)
        self.max_modulus = max_modulus
        self.argmax = argmax


class PreconditionError(WcolabError, ValueError):
    """A documented operation precondition does not hold."""


class ParameterError(WcolabError, ValueError):
    """A numeric parameter is outside its allowed range."""
