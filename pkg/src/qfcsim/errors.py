"""Exception types shared across the package."""


class QfcError(Exception):
    """Base class for all package-specific errors."""


class NotHermitian(QfcError):
    pass


class NoConvergence(QfcError):
    pass


class ShapeMismatch(QfcError):
    pass


class NegativeEigenvalue(QfcError):
    pass


class InvalidState(QfcError):
    pass


class UnknownLabel(QfcError):
    pass


class NotNormalized(QfcError):
    pass


class ZeroConversionProbability(QfcError):
    pass


class OutOfRange(QfcError):
    pass


class GridTooCoarse(QfcError):
    pass


class DivisionByZero(QfcError):
    pass


class NotInformationallyComplete(QfcError):
    pass


class ZeroTotalCounts(QfcError):
    pass


class ConfigError(QfcError):
    pass
