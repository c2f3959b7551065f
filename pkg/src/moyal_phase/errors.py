"""Exception hierarchy shared by every module."""


class MoyalPhaseError(Exception):
    """Base class for all library errors."""


class InvalidParameter(MoyalPhaseError, ValueError):
    pass


class GridTooSmall(InvalidParameter):
    """The state does not fit inside the box at the required boundary tolerance."""


class GridMismatch(InvalidParameter):
    """Two objects live on grids that cannot be combined."""


class SupportOverflow(MoyalPhaseError):
    """A shifted state would carry amplitude across the box boundary."""


class NonHermitianInput(MoyalPhaseError):
    pass


class TruncationRange(InvalidParameter):
    """An operator argument exceeds the calibrated range of a truncated Fock space."""


class UnstableStep(MoyalPhaseError):
    """Raised when a time step corrupts the state; ``step`` is the 1-based index."""

    def __init__(self, step: int, message: str):
        super().__init__(f"step {step}: {message}")
        self.step = step
