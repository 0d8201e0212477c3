"""Exception hierarchy.

Two families matter to callers: :class:`ValidationError` for bad inputs
(the CLI maps these to exit code 1) and :class:`NumericalError` for
failures of a numerical procedure on otherwise valid inputs (exit code 2).
"""


class PHTuneError(Exception):
    """Base class for all phtune errors."""


class ValidationError(PHTuneError, ValueError):
    pass


class NumericalError(PHTuneError, ArithmeticError):
    pass


# -- input validation -------------------------------------------------------

class DimensionMismatch(ValidationError):
    pass


class NotSymmetric(ValidationError):
    pass


class NotPositiveDefinite(ValidationError):
    pass


class NotPositiveDefiniteX(NotPositiveDefinite):
    pass


class NotPositiveSemidefinite(ValidationError):
    pass


class RankDeficientZ(ValidationError):
    pass


class NonzeroY(ValidationError):
    """Raised by operations whose theory assumes a zero lower-right block."""


class InvalidParams(ValidationError):
    pass


class InvalidZeta(ValidationError):
    pass


class IndefiniteHessian(NotPositiveDefinite):
    """The potential Hessian at the equilibrium is not positive definite."""


class IndefiniteR(NotPositiveDefinite):
    pass


class NotAnEquilibrium(ValidationError):
    pass


class DegenerateStep(ValidationError):
    pass


# -- numerical failures -----------------------------------------------------

class EigenSolverFailure(NumericalError):
    pass


class UnstableSpectrum(NumericalError):
    pass


class SingularMass(NumericalError):
    pass


class TransformMismatch(NumericalError):
    pass


class BracketFailure(NumericalError):
    pass


class NotHurwitz(NumericalError):
    pass


class SolveFailure(NumericalError):
    pass


class NoValidRadius(NumericalError):
    pass


class NonFiniteState(NumericalError):
    def __init__(self, message, step=None, time=None):
        super().__init__(message)
        self.step = step
        self.time = time


class AlreadyOverdamped(NumericalError):
    """Open-loop damping already meets the requested damping ratio.

    Only raised when a caller asks for strict behaviour; by default the
    tuning rule returns a floor gain and sets a flag instead.
    """
