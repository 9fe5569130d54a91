"""Exception hierarchy shared by every module of the package."""


class SchwarzBallError(Exception):
    """Base class for all errors raised by this package."""


class InputError(SchwarzBallError, ValueError):
    """Bad argument: wrong shape, point outside the ball, non-finite entries."""


class SingularityError(InputError):
    """Evaluation hit a pole of a Moebius node or of the strip map."""


class HypothesisViolation(InputError):
    """A checker was asked to test an inequality whose hypotheses fail."""


class NumericalError(SchwarzBallError, ArithmeticError):
    """An iterative routine did not converge."""

    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations
