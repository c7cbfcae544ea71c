"""Frequency-domain filtering of grayscale images.

The pipeline pads the image with zeros up to power-of-two dimensions,
transforms it, moves the zero frequency to the centre, multiplies by a disk
mask, undoes the shift, transforms back and crops to the original size.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core_math import next_pow2
from .errors import InvalidInputError, InvalidParametersError, InvalidSizeError
from .fft2d import fft2d, ifft2d
from .pgm import GrayImage

__all__ = [
    "FilterSpec",
    "Padded",
    "FilterResult",
    "pad_pow2",
    "spectrum",
    "center_shift",
    "center_unshift",
    "build_filter_mask",
    "apply_filter",
    "log_spectrum_image",
    "filter_image",
    "LOW_PASS",
    "PAPER_LITERAL",
]

log = logging.getLogger(__name__)

LOW_PASS = "low-pass"
PAPER_LITERAL = "paper-literal"
MODES = (LOW_PASS, PAPER_LITERAL)


@dataclass(frozen=True)
class FilterSpec:
    """Disk of radius ``b`` around ``(c1, c2)`` (row, column).

    ``low-pass`` keeps the disk and zeroes the rest; ``paper-literal`` zeroes
    the disk and keeps the rest. A missing centre means the grid centre
    ``(N/2, M/2)``.
    """

    b: float
    c1: float | None = None
    c2: float | None = None
    mode: str = LOW_PASS

    def __post_init__(self):
        if not self.b >= 0:
            raise InvalidParametersError(f"filter radius must be >= 0, got {self.b}")
        if self.mode not in MODES:
            raise InvalidParametersError(f"unknown filter mode {self.mode!r}; expected one of {MODES}")


class Padded(NamedTuple):
    grid: np.ndarray
    height: int
    width: int


def pad_pow2(image: GrayImage) -> Padded:
    """Zero-pad rows and columns up to the next power of two; pixels sit top-left."""
    n = next_pow2(image.height)
    m = next_pow2(image.width)
    grid = np.zeros((n, m), dtype=np.complex128)
    grid[: image.height, : image.width] = image.pixels
    return Padded(grid, image.height, image.width)


def spectrum(grid) -> np.ndarray:
    g = np.asarray(grid, dtype=np.complex128)
    return np.hypot(g.real, g.imag)


def _shift_amounts(shape):
    for d in shape:
        if d % 2 and d != 1:
            raise InvalidSizeError(f"center shift needs even dimensions, got {shape}")
    return tuple(d // 2 for d in shape)


def center_shift(grid) -> np.ndarray:
    """Swap quadrants so index (0, 0) lands on (N/2, M/2)."""
    g = np.asarray(grid)
    return np.roll(g, _shift_amounts(g.shape), axis=(0, 1))


def center_unshift(grid) -> np.ndarray:
    g = np.asarray(grid)
    return np.roll(g, tuple(-s for s in _shift_amounts(g.shape)), axis=(0, 1))


def build_filter_mask(dims, spec: FilterSpec) -> np.ndarray:
    n, m = dims
    c1 = n / 2 if spec.c1 is None else spec.c1
    c2 = m / 2 if spec.c2 is None else spec.c2
    x = np.arange(n, dtype=np.float64)[:, None]
    y = np.arange(m, dtype=np.float64)[None, :]
    inside = np.sqrt((x - c1) ** 2 + (y - c2) ** 2) <= spec.b
    if spec.mode == LOW_PASS:
        return inside.astype(np.float64)
    return (~inside).astype(np.float64)


def apply_filter(transform, mask) -> np.ndarray:
    t = np.asarray(transform, dtype=np.complex128)
    k = np.asarray(mask, dtype=np.float64)
    if t.shape != k.shape:
        raise InvalidInputError(f"mask shape {k.shape} does not match transform shape {t.shape}")
    out = np.empty_like(t)
    out.real = t.real * k
    out.imag = t.imag * k
    return out


def log_spectrum_image(magnitudes: np.ndarray, max_val: int = 255) -> GrayImage:
    """``floor(max_val * log(1+s) / log(1+s_max))`` as a viewable image."""
    s = np.asarray(magnitudes, dtype=np.float64)
    top = np.log1p(s.max())
    if top > 0:
        vals = np.floor(max_val * np.log1p(s) / top)
    else:
        vals = np.zeros_like(s)
    return GrayImage.from_array(np.clip(vals, 0, max_val).astype(np.int64), max_val=max_val)


def to_pixels(values: np.ndarray, max_val: int) -> np.ndarray:
    """Round half up, then clamp to ``[0, max_val]``."""
    return np.clip(np.floor(values + 0.5), 0, max_val).astype(np.int64)


@dataclass
class FilterResult:
    image: GrayImage
    spectrum_image: GrayImage
    padded_shape: tuple[int, int]
    # largest |Im| discarded after the inverse transform
    max_imag_residual: float
    transform: np.ndarray
    filtered_transform: np.ndarray


def filter_image(image: GrayImage, spec: FilterSpec, nproc: int | None = None) -> FilterResult:
    padded = pad_pow2(image)
    F = fft2d(padded.grid, nproc=nproc)
    shifted = center_shift(F)
    mask = build_filter_mask(shifted.shape, spec)
    filtered = center_unshift(apply_filter(shifted, mask))
    back = ifft2d(filtered, nproc=nproc)

    residual = float(np.abs(back.imag).max())
    log.info(
        "filtered %dx%d image on a %dx%d grid; max discarded imaginary part %.3g",
        image.height, image.width, *F.shape, residual,
    )
    crop = back.real[: padded.height, : padded.width]
    out = GrayImage.from_array(to_pixels(crop, image.max_val), max_val=image.max_val)
    return FilterResult(
        image=out,
        spectrum_image=log_spectrum_image(spectrum(shifted)),
        padded_shape=F.shape,
        max_imag_residual=residual,
        transform=F,
        filtered_transform=filtered,
    )
