"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class SBOError(Exception):
    """Base class for all errors raised by this package."""


class PoleError(SBOError, ZeroDivisionError):
    """A Gamma/Pochhammer expression hit a genuine pole."""

    def __init__(self, message: str, *, k: int | None = None) -> None:
        super().__init__(message)
        self.k = k


class NotBothPoles(SBOError, ValueError):
    """A pole-cancellation limit was requested but only one side is singular."""


class ParameterError(SBOError, ValueError):
    """Parameters violate a line/region constraint of the requested quantity."""


class NotRationalError(ParameterError):
    """The requested exact value is a transcendental multiple of a rational."""


class DegreeError(SBOError, ValueError):
    pass


class EmptySpace(SBOError, ValueError):
    pass


class ParityError(SBOError, ValueError):
    pass


class SupportError(SBOError, ValueError):
    pass


class LatticeError(SBOError, ValueError):
    """A pair index does not lie on the lattice of the group case."""


class SingularSystem(SBOError, ArithmeticError):
    pass


class InternalConsistencyError(SBOError, AssertionError):
    """A relation references an off-lattice pair with a nonzero coefficient."""


class WindowTooSmall(SBOError, ValueError):
    pass


class WindowUnstable(SBOError, RuntimeError):
    def __init__(self, message: str, *, dims: dict[int, int] | None = None) -> None:
        super().__init__(message)
        self.dims = dims or {}


class MismatchError(SBOError, AssertionError):
    def __init__(self, message: str, *, pair=None) -> None:
        super().__init__(message)
        self.pair = pair


class CalibrationError(SBOError, RuntimeError):
    pass


class DimensionError(SBOError, ValueError):
    pass


class ConvergenceError(SBOError, RuntimeError):
    pass


class ToleranceExceeded(SBOError, AssertionError):
    def __init__(self, message: str, *, where=None) -> None:
        super().__init__(message)
        self.where = where
