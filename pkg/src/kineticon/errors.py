"""Exception and warning types raised across the toolkit."""


class KineticonError(Exception):
    """Base class for all toolkit errors."""


class InvalidDimensionError(KineticonError, ValueError):
    pass


class DomainError(KineticonError, ValueError):
    pass


class ContractViolationError(KineticonError, ValueError):
    pass


class ConvergenceError(KineticonError, RuntimeError):
    pass


class ValidityError(KineticonError, ValueError):
    """Raised when a model is evaluated outside its range of validity."""


class ValidityWarning(UserWarning):
    """Soft version of ValidityError; escalate with warnings.simplefilter('error')."""


class IncompleteMaterialError(KineticonError, ValueError):
    pass


class RegistryError(KineticonError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class AmbiguousResonanceError(KineticonError, ValueError):
    pass


class BifurcationError(KineticonError, RuntimeError):
    """Duffing fixed point is not unique (or did not settle).

    ``low_branch`` and ``high_branch`` hold the resonance frequencies (Hz)
    reached from the low- and high-amplitude starting points.
    """

    def __init__(self, message, low_branch=None, high_branch=None):
        super().__init__(message)
        self.low_branch = low_branch
        self.high_branch = high_branch


class ModeIndexError(KineticonError, ValueError):
    pass


class UnreachableLoadingError(KineticonError, ValueError):
    pass


class ConfigValidationError(KineticonError, ValueError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid config:\n  " + "\n  ".join(self.errors))
