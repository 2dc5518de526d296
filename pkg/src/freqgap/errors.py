"""Exception hierarchy for freqgap."""


class FreqGapError(Exception):
    """Base class for all errors raised by this package."""


class InvalidFrequency(FreqGapError, ValueError):
    pass


class InvalidDimension(FreqGapError, ValueError):
    pass


class NonconvergentSeries(FreqGapError, ArithmeticError):
    """The hypergeometric series did not reach its stopping rule in time.

    This points at a bug (or an absurd input), never at a legitimate regime.
    """


class IndeterminateSign(FreqGapError):
    """A value needed for a sign decision failed the 1000x error margin."""


class BranchNotFound(FreqGapError):
    pass


class InternalInconsistency(FreqGapError, AssertionError):
    """Numerical evidence contradicts the predicted endpoint signs or gap rule.

    Either a bug or a counterexample. Never caught inside the package.
    """


class QuadratureFailure(FreqGapError, ArithmeticError):
    pass


class CheckFailed(FreqGapError, AssertionError):
    """A catalog solution violated one of its defining conditions."""

    def __init__(self, message, sample=None):
        super().__init__(message)
        self.sample = sample
