"""Exception types raised by tailsum."""


class TailsumError(Exception):
    """Base class for every error raised by the library."""


class NegativeProb(TailsumError, ValueError):
    pass


class TotalMassExceedsOne(TailsumError, ValueError):
    pass


class InvalidParameters(TailsumError, ValueError):
    pass


class DomainError(TailsumError, ValueError):
    pass


class NonConvergence(TailsumError, RuntimeError):
    pass


class EnumTooLarge(TailsumError, ValueError):
    pass


class QuantileUnavailable(TailsumError, ValueError):
    """The requested quantile level lies below the Monte Carlo resolution."""


class NoFit(TailsumError, RuntimeError):
    """No approximation constant up to the search cap fits the two curves."""


class ParseError(TailsumError, ValueError):
    pass


class FlagMismatch(TailsumError, ValueError):
    """A declared structure flag does not hold for the given atoms."""


class EmptySequence(TailsumError, ValueError):
    pass
