"""Exception and warning types raised across the package."""


class PcgError(Exception):
    """Base class for all errors raised by pcg_mub."""


class WindowTooSmallError(PcgError, ValueError):
    """Grid window does not cover the state (truncation would bias results)."""


class ShiftOutOfRangeError(PcgError, ValueError):
    pass


class DomainMismatchError(PcgError, ValueError):
    pass


class ZeroSupportError(PcgError, ValueError):
    """The projected state has (numerically) zero norm."""


class TruncationCapExceededError(PcgError, RuntimeError):
    pass


class NonConvergenceError(PcgError, RuntimeError):
    pass


class DegenerateWidthError(PcgError, ValueError):
    pass


class WindowMissError(PcgError, RuntimeError):
    """Search maximum sits on the boundary of the search window."""


class WindowLeakageWarning(UserWarning):
    pass
