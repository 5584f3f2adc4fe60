"""Exception hierarchy shared by all bregsplit modules."""


class BregsplitError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatchError(BregsplitError):
    """Operands have incompatible shapes."""


class NotPositiveDefiniteError(BregsplitError):
    """A matrix required to be positive definite has a pivot <= 0."""


class NonPositiveDiagonalError(BregsplitError):
    """A diagonal metric design received a non-positive diagonal entry."""


class NoConvergenceError(BregsplitError):
    """An iterative routine hit its iteration cap before reaching tolerance."""


class NoSubgradientError(BregsplitError):
    """An oracle without a subgradient was used in a forward step."""


class ProxUnavailableError(BregsplitError):
    """An oracle has no closed-form prox for the requested metric."""


class AlphaOutOfRangeError(BregsplitError):
    """An averaging coefficient is missing or outside (0, 1)."""


class NoQuadraticModelError(BregsplitError):
    """Sigma estimation was requested for an oracle without a quadratic model."""


class InadmissiblePairError(BregsplitError):
    """A (sigma_lb, sigma_ub) pair puts the contraction radicand below zero."""


class MissingAlphaError(BregsplitError):
    """A Douglas-Rachford rate prediction needs an averaging coefficient."""


class MissingIteratesError(BregsplitError):
    """A trace operation needs stored iterates but tracing was off."""


class DimensionTooSmallError(BregsplitError):
    """A difference operator needs at least two samples."""


class SegmentsExceedLengthError(BregsplitError):
    """A piecewise-constant signal cannot have more segments than samples."""


class EmptyRunError(BregsplitError):
    """A solver was asked to run zero iterations."""


class ConfigError(BregsplitError):
    """An experiment configuration is missing or malformed.

    Carries the offending key when one can be identified.
    """

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class ParseError(BregsplitError):
    """A data or trace file could not be parsed.

    Carries the 1-based line number when one can be identified.
    """

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line
