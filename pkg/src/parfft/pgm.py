"""Netpbm grayscale (PGM) reading and writing, ASCII ``P2`` and binary ``P5``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, PGMError

__all__ = ["GrayImage", "read_pgm", "write_pgm", "load_pgm", "save_pgm"]

_WHITESPACE = b" \t\n\r\v\f"


@dataclass(eq=False)
class GrayImage:
    """Integer raster of ``height`` rows by ``width`` columns, values in ``[0, max_val]``."""

    width: int
    height: int
    pixels: np.ndarray
    max_val: int = 255

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.size != self.width * self.height:
            raise InvalidInputError(
                f"{px.size} pixels do not fill a {self.width}x{self.height} image"
            )
        if self.width < 1 or self.height < 1:
            raise InvalidInputError("image dimensions must be positive")
        if not 1 <= self.max_val <= 65535:
            raise InvalidInputError(f"max_val must be in [1, 65535], got {self.max_val}")
        px = px.astype(np.int64).reshape(self.height, self.width)
        if px.min() < 0 or px.max() > self.max_val:
            raise InvalidInputError(f"pixel values outside [0, {self.max_val}]")
        self.pixels = px

    @classmethod
    def from_array(cls, array, max_val: int = 255) -> GrayImage:
        a = np.asarray(array)
        return cls(width=a.shape[1], height=a.shape[0], pixels=a, max_val=max_val)

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and self.max_val == other.max_val
            and np.array_equal(self.pixels, other.pixels)
        )


class _Cursor:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def skip_space(self):
        data = self.data
        while self.pos < len(data):
            c = data[self.pos : self.pos + 1]
            if c == b"#":
                nl = data.find(b"\n", self.pos)
                self.pos = len(data) if nl < 0 else nl + 1
            elif c in _WHITESPACE:
                self.pos += 1
            else:
                break

    def integer(self, what: str) -> tuple[int, int]:
        self.skip_space()
        start = self.pos
        while self.pos < len(self.data) and self.data[self.pos : self.pos + 1].isdigit():
            self.pos += 1
        if start == self.pos:
            if self.pos >= len(self.data):
                raise PGMError(f"truncated data: missing {what}", self.pos)
            raise PGMError(f"expected an unsigned integer for {what}", self.pos)
        return int(self.data[start : self.pos]), start


def read_pgm(data: bytes) -> GrayImage:
    if data[:2] not in (b"P2", b"P5"):
        raise PGMError(f"bad magic number {data[:2]!r}", 0)
    binary = data[:2] == b"P5"
    cur = _Cursor(data)
    cur.pos = 2
    if cur.pos < len(data) and data[cur.pos : cur.pos + 1] not in _WHITESPACE + b"#":
        raise PGMError("magic number must be followed by whitespace", cur.pos)

    width, off = cur.integer("width")
    if width < 1:
        raise PGMError("width must be positive", off)
    height, off = cur.integer("height")
    if height < 1:
        raise PGMError("height must be positive", off)
    max_val, off = cur.integer("max value")
    if not 1 <= max_val <= 65535:
        raise PGMError(f"max value {max_val} outside [1, 65535]", off)

    count = width * height
    if binary:
        if cur.pos >= len(data) or data[cur.pos : cur.pos + 1] not in _WHITESPACE:
            raise PGMError("expected a single whitespace byte before the raster", cur.pos)
        start = cur.pos + 1
        depth = 1 if max_val < 256 else 2
        need = count * depth
        raster = data[start : start + need]
        if len(raster) < need:
            raise PGMError(f"truncated raster: need {need} bytes, got {len(raster)}", len(data))
        px = np.frombuffer(raster, dtype=np.uint8 if depth == 1 else ">u2").astype(np.int64)
        bad = np.flatnonzero(px > max_val)
        if bad.size:
            raise PGMError(f"pixel value {px[bad[0]]} exceeds max value {max_val}", start + int(bad[0]) * depth)
    else:
        values = np.empty(count, dtype=np.int64)
        for k in range(count):
            v, off = cur.integer(f"pixel {k}")
            if v > max_val:
                raise PGMError(f"pixel value {v} exceeds max value {max_val}", off)
            values[k] = v
        px = values
    return GrayImage(width, height, px.reshape(height, width), max_val)


def write_pgm(image: GrayImage, binary: bool = True) -> bytes:
    """Serialize as ``P5`` (default) or ``P2``. Two bytes per sample when ``max_val > 255``."""
    header = f"{'P5' if binary else 'P2'}\n{image.width} {image.height}\n{image.max_val}\n".encode()
    if binary:
        dtype = np.uint8 if image.max_val < 256 else ">u2"
        return header + image.pixels.astype(dtype).tobytes()
    lines = [" ".join(str(int(v)) for v in row) for row in image.pixels]
    return header + ("\n".join(lines) + "\n").encode()


def load_pgm(path) -> GrayImage:
    with open(path, "rb") as fh:
        return read_pgm(fh.read())


def save_pgm(image: GrayImage, path, binary: bool = True) -> None:
    with open(path, "wb") as fh:
        fh.write(write_pgm(image, binary=binary))
