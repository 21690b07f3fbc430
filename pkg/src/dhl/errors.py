"""Exception hierarchy shared by the engine and the command line."""


class DHLError(Exception):
    """Base class for all engine errors."""


class DomainError(DHLError, ValueError):
    """A point lies outside the domain of the chart it was given in."""


class UnsupportedClassError(DHLError, ValueError):
    """A homology class is not expressible in the target's stored basis."""


class InvalidFrameError(DHLError, ValueError):
    pass


class IncompatibilityError(DHLError, ValueError):
    """Objects defined over different surfaces were combined."""


class DegenerateMapError(DHLError, ValueError):
    pass


class RepresentationError(DHLError, TypeError):
    """A field lacks the representation (pointwise or spectral) an operator needs."""


class UnsupportedDecompositionError(DHLError, NotImplementedError):
    pass


class AccuracyError(DHLError, ArithmeticError):
    """Quadrature did not reach the requested accuracy."""


class UnderResolutionError(DHLError, ValueError):
    pass


class InconclusiveRankError(DHLError, ArithmeticError):
    """The singular value gap is too small to certify a kernel dimension."""

    def __init__(self, message, gap=None):
        super().__init__(message)
        self.gap = gap


class StiffnessError(DHLError, ArithmeticError):
    pass


class ConfigError(DHLError, ValueError):
    pass
