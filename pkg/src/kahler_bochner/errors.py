"""Exception hierarchy shared by every module of the package."""


class KaehlerError(Exception):
    """Base class for all errors raised by kahler_bochner."""


class FrameInvalid(KaehlerError):
    pass


class NotSymmetric(KaehlerError):
    pass


class NotJCommuting(KaehlerError):
    pass


class DimensionMismatch(KaehlerError):
    pass


class NotInvertible(KaehlerError):
    pass


class OutsideDomain(KaehlerError):
    pass


class NotPositiveDefinite(KaehlerError):
    pass


class UnknownName(KaehlerError):
    pass


class UnsupportedDimension(KaehlerError):
    pass


class InconsistentBundle(KaehlerError):
    pass


class DegenerateDraw(KaehlerError):
    pass


class BochnerFlat(KaehlerError):
    pass


class ProbeSearchFailed(KaehlerError):
    pass


class NotJLinear(KaehlerError):
    pass


class ParseError(KaehlerError):
    """Malformed chart or map file; ``line`` is 1-based, or None."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
