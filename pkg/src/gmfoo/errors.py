"""Exception types shared across the package."""


class GmfooError(Exception):
    """Base class for errors raised by this package."""


class NumericalError(GmfooError):
    """Linear algebra failed beyond recovery (e.g. covariance stays
    indefinite after the full jitter ladder)."""


class NetworkFormatError(GmfooError, ValueError):
    """A serialized network file is malformed or internally inconsistent."""


class GeometryError(GmfooError, ValueError):
    """A curve profile does not describe a usable polygon."""
