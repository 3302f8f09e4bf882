"""Exception hierarchy shared by every layer of the package."""


class ModelSpaceError(Exception):
    """Base class for all errors raised by :mod:`modelspace`."""


class ZeroClusterAmbiguity(ModelSpaceError):
    """Two zeros are too close to separate but too far to identify."""


class NotAnalytic(ModelSpaceError):
    pass


class PoleOnCircle(ModelSpaceError):
    pass


class NotNonnegative(ModelSpaceError):
    pass


class OddBoundaryMultiplicity(ModelSpaceError):
    pass


class DegenerateProbe(ModelSpaceError):
    pass


class NotInvariant(ModelSpaceError):
    pass


class NotPositive(ModelSpaceError):
    pass


class FitFailure(ModelSpaceError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class RankDeficient(ModelSpaceError):
    pass


class DegreeOverflow(ModelSpaceError):
    pass


class DegreeBoundExceeded(ModelSpaceError):
    pass


class CoprimenessUndecided(ModelSpaceError):
    pass


class StabilizationFailure(ModelSpaceError):
    pass


class SymbolicInputRequiresVerifier(ModelSpaceError):
    pass


class FormulaMismatch(ModelSpaceError):
    pass


class RouteMismatch(ModelSpaceError):
    pass


class Singular(ModelSpaceError):
    pass


class StructureNotSupported(ModelSpaceError):
    pass


class Undecided(ModelSpaceError):
    pass


class ParseError(ModelSpaceError):
    """Malformed input document; carries the offending path."""

    def __init__(self, message, path=None):
        super().__init__(message if path is None else f"{path}: {message}")
        self.path = path
