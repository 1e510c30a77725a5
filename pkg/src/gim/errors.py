"""Exception types shared across the library."""


class GimError(Exception):
    """Base class for all library errors."""


class PnmError(GimError):
    """Problem with a PNM file."""


class MalformedHeaderError(PnmError):
    """PNM header could not be parsed."""


class TruncatedPayloadError(PnmError):
    """PNM payload holds fewer bytes than the header promises."""


class UnsupportedMaxvalError(PnmError):
    """PNM maxval is not 255."""


class DimensionMismatchError(GimError, ValueError):
    """Vectors or grids with incompatible dimensions."""


class MaskFileError(GimError):
    """Problem parsing a mask file; carries the offending line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class EmptyMaskError(GimError):
    """An operation that needs at least one mask point got none."""


class MaskSaturatedError(GimError):
    """No free (feature, pixel) slot is left to insert a point into."""


class SolverBreakdownError(GimError):
    """A Krylov solver produced non-finite values."""
