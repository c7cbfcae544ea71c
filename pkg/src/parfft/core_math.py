"""Complex helpers, twiddle factors, bit-reversal ordering and the radix-2 butterfly.

Complex data inside the transforms is carried as a pair of float64 arrays
``(re, im)``. Every complex product is spelled out on the real parts so that
the same butterfly gives bit-identical results no matter how the work is
split across workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSizeError

__all__ = [
    "TwiddleTable",
    "is_power_of_two",
    "log2_exact",
    "next_pow2",
    "twiddle_table",
    "bit_reverse_order",
    "split_complex",
    "join_complex",
    "combine",
    "butterfly_level",
]


def is_power_of_two(n) -> bool:
    return isinstance(n, (int, np.integer)) and not isinstance(n, bool) and n >= 1 and (n & (n - 1)) == 0


def log2_exact(n: int) -> int:
    if not is_power_of_two(n):
        raise InvalidSizeError(f"size must be a positive power of two, got {n!r}")
    return int(n).bit_length() - 1


def next_pow2(d: int) -> int:
    """Smallest power of two >= d (d itself when it already is one)."""
    if d < 1:
        raise InvalidSizeError(f"dimension must be positive, got {d}")
    return 1 << (int(d) - 1).bit_length()


@dataclass(frozen=True)
class TwiddleTable:
    """The ``n`` factors ``exp(-2*pi*i*j/n)`` for ``j = 0..n-1``."""

    n: int
    re: np.ndarray
    im: np.ndarray

    @property
    def factors(self) -> np.ndarray:
        return self.re + 1j * self.im

    def stride(self, size: int) -> tuple[np.ndarray, np.ndarray]:
        """Factors ``exp(-2*pi*i*k/size)`` for ``k < size/2``, read off this table."""
        step = self.n // size
        half = size // 2
        return self.re[: half * step : step], self.im[: half * step : step]


def twiddle_table(n: int) -> TwiddleTable:
    log2_exact(n)
    # each factor straight from cos/sin so the error does not grow with n
    angle = -2.0 * np.pi * np.arange(n) / n
    re = np.cos(angle)
    im = np.sin(angle)
    re[0], im[0] = 1.0, 0.0
    re.flags.writeable = False
    im.flags.writeable = False
    return TwiddleTable(n, re, im)


def bit_reverse_order(n: int) -> np.ndarray:
    """Leaf order of the radix-2 interpolation tree.

    Position ``p`` holds the index whose ``log2(n)``-bit binary form is the
    reverse of ``p``; for n=8 that is ``[0, 4, 2, 6, 1, 5, 3, 7]``.
    """
    bits = log2_exact(n)
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for _ in range(bits):
        rev = (rev << 1) | (idx & 1)
        idx = idx >> 1
    return rev


def split_complex(z) -> tuple[np.ndarray, np.ndarray]:
    z = np.asarray(z)
    if np.iscomplexobj(z):
        return np.ascontiguousarray(z.real, dtype=np.float64), np.ascontiguousarray(z.imag, dtype=np.float64)
    re = np.array(z, dtype=np.float64)
    return re, np.zeros_like(re)


def join_complex(re: np.ndarray, im: np.ndarray) -> np.ndarray:
    out = np.empty(np.shape(re), dtype=np.complex128)
    out.real = re
    out.imag = im
    return out


def combine(even_re, even_im, odd_re, odd_im, w_re, w_im):
    """Merge two child coefficient blocks into their parent.

    ``even``/``odd`` have shape ``(..., h)``; ``w`` holds the ``h`` twiddles.
    Returns ``(re, im)`` of shape ``(..., 2h)`` with
    ``P[k] = E[k] + w^k O[k]`` and ``P[k+h] = E[k] - w^k O[k]``.
    """
    t_re = w_re * odd_re - w_im * odd_im
    t_im = w_re * odd_im + w_im * odd_re
    out_re = np.concatenate((even_re + t_re, even_re - t_re), axis=-1)
    out_im = np.concatenate((even_im + t_im, even_im - t_im), axis=-1)
    return out_re, out_im


def butterfly_level(re, im, size: int, table: TwiddleTable):
    """Apply one tree level: combine adjacent blocks of ``size/2`` into blocks of ``size``.

    ``re``/``im`` have shape ``(..., L)`` with ``L`` a multiple of ``size``.
    """
    length = re.shape[-1]
    half = size // 2
    lead = re.shape[:-1]
    shaped = lead + (length // size, 2, half)
    r = re.reshape(shaped)
    i = im.reshape(shaped)
    w_re, w_im = table.stride(size)
    out_re, out_im = combine(r[..., 0, :], i[..., 0, :], r[..., 1, :], i[..., 1, :], w_re, w_im)
    return out_re.reshape(lead + (length,)), out_im.reshape(lead + (length,))
