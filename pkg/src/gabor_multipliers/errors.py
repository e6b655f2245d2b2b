"""Exception hierarchy shared by every module of the package."""


class GaborError(Exception):
    """Base class for all errors raised by this package."""


class SingularMatrix(GaborError):
    pass


class DensityViolation(GaborError):
    """The pair violates |det(AB)| <= 1, so no Parseval generator exists."""


class Unreducible(GaborError):
    pass


class NotCanonical(GaborError):
    pass


class NotCoprime(GaborError):
    pass


class BadInput(GaborError):
    pass


class BadParameter(GaborError):
    pass


class ToleranceExceeded(GaborError):
    """An epsilon-mode defect landed in the ambiguous band (eps, 10*eps)."""


class HypothesisViolation(GaborError):
    pass


class ConvergenceFailure(GaborError):
    pass


class NoRecipe(GaborError):
    pass


class HypothesisCheckFailed(GaborError):
    """A strategy-set audit failed; the message names the first violated condition."""


class WindowTooSmall(GaborError):
    pass


class NotStepCompatible(GaborError):
    pass


class UnboundedSupport(GaborError):
    pass


class NonReducedPairWithoutBases(GaborError):
    pass


class ZeroTestFunction(GaborError):
    pass


class BaseRelationFails(GaborError):
    pass


class MixedShear(GaborError):
    """Cells with different shears cannot share one box frame."""


class ParseError(GaborError):
    """Malformed input file; ``lineno`` points at the offending line when known."""

    def __init__(self, msg: str, lineno: int | None = None):
        super().__init__(msg if lineno is None else f"line {lineno}: {msg}")
        self.lineno = lineno
