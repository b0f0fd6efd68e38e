"""Exception types shared across the package."""


class DgdyError(Exception):
    """Base class for errors raised by the engine."""


class ValidationError(DgdyError, ValueError):
    """Input data violates a structural invariant."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class ResourceCapError(DgdyError):
    """A linear system would exceed the configured number of unknowns."""

    def __init__(self, what: str, unknowns: int, cap: int):
        super().__init__(f"{what}: {unknowns} unknowns exceeds the cap of {cap}")
        self.what = what
        self.unknowns = unknowns
        self.cap = cap


class WindowError(DgdyError, ValueError):
    """Requested cohomology lies outside the range that was computed."""


class PaddingError(DgdyError):
    """Padded horizontal differential is inconsistent (e.g. d_h^2 != 0)."""


DEFAULT_UNKNOWN_CAP = 10**6
