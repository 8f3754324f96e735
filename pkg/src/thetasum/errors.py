"""Exception hierarchy; the CLI maps each class to an exit code."""


class ThetaSumError(Exception):
    exit_code = 1


class InputError(ThetaSumError, ValueError):
    """Malformed or out-of-domain input."""

    exit_code = 2


class SingularityError(InputError):
    """Evaluation requested too close to a singular point."""


class PrecisionExhausted(ThetaSumError):
    """A digit, floor or orbit point could not be certified at the working precision."""

    exit_code = 3


class ToleranceNotMet(ThetaSumError):
    """A numerical routine could not reach the requested tolerance."""

    exit_code = 4

    def __init__(self, message, value=None, est_error=None):
        super().__init__(message)
        self.value = value
        self.est_error = est_error
