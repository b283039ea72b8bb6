"""Exception types raised across the package."""


class TPError(Exception):
    """Base class for every error raised by tpcohomology."""


class NotPolynomialInVariable(TPError):
    """An antiderivative was requested in a variable that occurs in a denominator."""


class UndeclaredDenominator(TPError):
    """A quotient uses a denominator that the ring does not localize at."""


class NotInvertible(TPError):
    """Division by an element that is not a unit of the localized ring."""


class RingMismatch(TPError):
    pass


class ArityMismatch(TPError):
    pass


class NotTransversal(TPError):
    """The declared transversal frame fails to complement the leaves over the ring."""


class RankDefect(TPError):
    """The frame sizes do not match the generic rank of the Poisson tensor."""


class NotHomogeneous(TPError):
    pass


class CodomainOverflow(TPError):
    def __init__(self, message, monomial=None):
        super().__init__(message)
        self.monomial = monomial


class NotACocycle(TPError):
    pass


class JacobiViolation(TPError):
    pass


class HypothesisFailure(TPError):
    pass


class DimensionMismatch(TPError):
    pass


class NotAFlag(TPError):
    pass


class PointOutsideOmega(TPError):
    """A sample point makes one of the declared denominators vanish."""


class QuadratureFailure(TPError):
    pass


class NewtonDivergence(TPError):
    pass


class ParseError(TPError):
    pass


class ConfigError(TPError):
    pass


class CatalogLoadError(TPError):
    pass
