"""Exception hierarchy shared by the library and the CLI."""


class OptStratError(Exception):
    """Base class for every error raised by this package."""


class NoKnowledge(OptStratError):
    """The indicator is uncorrelated with the return (rho == 0).

    Not a failure: callers fall back to buy-and-hold on sign(mu).
    """


class DegenerateCorrelation(OptStratError):
    """|rho| == 1, where the ratio g1/g2 is unbounded."""


class QuadratureError(OptStratError):
    """Adaptive quadrature hit its subdivision limit before meeting tolerance."""


class NonUnimodalError(OptStratError):
    """The lambda search found more than one local maximum of the IR curve."""


class DataError(OptStratError):
    """Malformed or unusable input data."""


class RankDeficiencyError(DataError):
    """Collinear indicator columns in a multi-indicator regression."""

    def __init__(self, message, columns=()):
        super().__init__(message)
        self.columns = tuple(columns)
