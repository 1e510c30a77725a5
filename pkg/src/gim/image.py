"""Raster images on the 0-255 intensity scale, binary PNM I/O, and MSE.

Images are stored channel-planar: each channel is one contiguous vector of
length N = width * height in row-major pixel order, so per-channel solves
can work on flat vectors directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatchError,
    MalformedHeaderError,
    TruncatedPayloadError,
    UnsupportedMaxvalError,
)

_WHITESPACE = b" \t\n\r\x0b\x0c"


@dataclass(frozen=True)
class PixelGrid:
    """Real-valued image with 1 (grey) or 3 (RGB) channel planes.

    ``values`` has shape (channels, N); pixel j of a plane sits at
    (x, y) = (j % width, j // width).  Intensities stay on the 0-255
    scale as floats; nothing is normalised.
    """

    width: int
    height: int
    channels: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("width and height must be >= 1")
        if self.channels not in (1, 3):
            raise ValueError("channels must be 1 or 3")
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.size != self.width * self.height * self.channels:
            raise DimensionMismatchError(
                f"expected {self.width * self.height * self.channels} values, "
                f"got {vals.size}"
            )
        vals = np.ascontiguousarray(vals.reshape(self.channels, -1))
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def pixel_count(self) -> int:
        return self.width * self.height

    def plane(self, channel: int) -> np.ndarray:
        """Flat (N,) view of one channel."""
        return self.values[channel]

    def planes(self) -> np.ndarray:
        """All channels as a (channels, N) array."""
        return self.values

    @classmethod
    def from_planes(cls, width: int, height: int, planes) -> "PixelGrid":
        planes = np.asarray(planes, dtype=np.float64)
        if planes.ndim == 1:
            planes = planes[None, :]
        return cls(width, height, planes.shape[0], planes)


@dataclass(frozen=True)
class ErrorReport:
    """Mean squared error over all pixels and channels."""

    mse: float
    per_channel_mse: tuple


def mse(u: PixelGrid, f: PixelGrid) -> ErrorReport:
    """MSE between two grids of identical shape, normalised by pixel count."""
    if (u.width, u.height, u.channels) != (f.width, f.height, f.channels):
        raise DimensionMismatchError(
            f"grid shapes differ: {(u.width, u.height, u.channels)} vs "
            f"{(f.width, f.height, f.channels)}"
        )
    diff = u.values - f.values
    per_channel = tuple(float(np.mean(d * d)) for d in diff)
    return ErrorReport(mse=float(np.mean(diff * diff)), per_channel_mse=per_channel)


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    """Read one header token, skipping whitespace and # comments."""
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif c in _WHITESPACE:
            pos += 1
        else:
            break
    if pos >= n:
        raise MalformedHeaderError("unexpected end of header")
    start = pos
    while pos < n and data[pos : pos + 1] not in _WHITESPACE and data[pos : pos + 1] != b"#":
        pos += 1
    return data[start:pos], pos


def _int_token(data: bytes, pos: int, what: str) -> tuple[int, int]:
    token, pos = _next_token(data, pos)
    try:
        value = int(token)
    except ValueError:
        raise MalformedHeaderError(f"{what}: not an integer: {token!r}") from None
    return value, pos


def read_pnm(path) -> PixelGrid:
    """Read a binary PGM (P5) or PPM (P6) file with maxval 255."""
    with open(path, "rb") as fh:
        data = fh.read()

    magic, pos = _next_token(data, 0)
    if magic == b"P5":
        channels = 1
    elif magic == b"P6":
        channels = 3
    else:
        raise MalformedHeaderError(f"unsupported magic {magic!r} (want P5 or P6)")

    width, pos = _int_token(data, pos, "width")
    height, pos = _int_token(data, pos, "height")
    maxval, pos = _int_token(data, pos, "maxval")
    if width < 1 or height < 1:
        raise MalformedHeaderError(f"bad dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedMaxvalError(f"maxval {maxval} not supported (want 255)")
    if pos >= len(data) or data[pos : pos + 1] not in _WHITESPACE:
        raise MalformedHeaderError("missing whitespace after maxval")
    pos += 1

    need = width * height * channels
    payload = data[pos : pos + need]
    if len(payload) < need:
        raise TruncatedPayloadError(
            f"payload holds {len(payload)} bytes, header promises {need}"
        )
    raw = np.frombuffer(payload, dtype=np.uint8).astype(np.float64)
    if channels == 3:
        planes = raw.reshape(-1, 3).T  # interleaved on disk -> planar in memory
    else:
        planes = raw[None, :]
    return PixelGrid(width, height, channels, planes)


def quantize(grid: PixelGrid) -> np.ndarray:
    """(channels, N) uint8 planes: clamp to [0, 255], round half away from zero."""
    clamped = np.clip(grid.values, 0.0, 255.0)
    return np.floor(clamped + 0.5).astype(np.uint8)


def write_pnm(grid: PixelGrid, path) -> None:
    """Write a binary PGM/PPM file; values are clamped and rounded."""
    bytes_planar = quantize(grid)
    if grid.channels == 1:
        magic, body = b"P5", bytes_planar[0].tobytes()
    else:
        magic, body = b"P6", bytes_planar.T.reshape(-1).tobytes()
    header = b"%s\n%d %d\n255\n" % (magic, grid.width, grid.height)
    with open(path, "wb") as fh:
        fh.write(header + body)
