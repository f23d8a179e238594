"""Exception hierarchy shared by all modules."""


class MarkovError(Exception):
    """Base class for every error raised by markov_clt."""


class NotAGenerator(MarkovError, ValueError):
    """Negative off-diagonal rate, nonzero row sum, or malformed matrix."""


class Reducible(MarkovError, ValueError):
    """The jump graph is not strongly connected."""


class DegenerateStationary(MarkovError, ValueError):
    """The stationary vector is not unique or not strictly positive."""


class DimensionMismatch(MarkovError, ValueError):
    pass


class BadParams(MarkovError, ValueError):
    pass


class NotCentered(MarkovError, ValueError):
    pass


class NotSelfAdjoint(MarkovError, ValueError):
    pass


class NegativeSpectrum(MarkovError, ValueError):
    pass


class SingularSystem(MarkovError, ArithmeticError):
    pass


class NumericalBreakdown(MarkovError, ArithmeticError):
    pass


class QuadratureNotConverged(MarkovError, ArithmeticError):
    pass


class PathChainMismatch(MarkovError, ValueError):
    pass


class AbsorbingState(MarkovError, ValueError):
    pass


class SigmaZero(MarkovError, ValueError):
    """Asymptotic variance vanishes, so standardization is undefined."""


class ParseError(MarkovError, ValueError):
    pass


class SchemaError(MarkovError, ValueError):
    pass
