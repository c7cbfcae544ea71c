"""Sequential transforms.

Normalization follows the coefficient convention ``c_k = (1/N) sum_j f_j e^{-2 pi i k j / N}``:
the forward transform carries the ``1/N`` and the inverse is a plain sum.
"""

from __future__ import annotations

import numpy as np

from .core_math import (
    bit_reverse_order,
    butterfly_level,
    join_complex,
    log2_exact,
    split_complex,
    twiddle_table,
)
from .errors import InvalidInputError, InvalidSizeError

__all__ = ["as_complex_vector", "dft_oracle", "fft", "ifft", "eval_exp_poly", "forward_sum"]


def as_complex_vector(samples, *, allow_nd: bool = False) -> np.ndarray:
    """Coerce to a complex128 array, rejecting NaN/Inf and empty input."""
    z = np.asarray(samples, dtype=np.complex128)
    if z.ndim == 0:
        z = z.reshape(1)
    if not allow_nd and z.ndim != 1:
        raise InvalidInputError(f"expected a 1-D vector, got shape {z.shape}")
    if z.shape[-1] == 0 or z.size == 0:
        raise InvalidSizeError("input is empty")
    if not np.all(np.isfinite(z)):
        raise InvalidInputError("input contains NaN or infinite values")
    return z


def dft_oracle(samples) -> np.ndarray:
    """Direct O(N^2) evaluation of the normalized DFT. Any N >= 1 is accepted."""
    x = as_complex_vector(samples)
    n = x.shape[0]
    kj = np.outer(np.arange(n), np.arange(n)) % n
    w = np.exp(-2j * np.pi * kj / n)
    out = np.empty(n, dtype=np.complex128)
    for k in range(n):
        acc = 0j
        for j in range(n):
            acc += x[j] * w[k, j]
        out[k] = acc
    return out / n


def _tree_transform(re, im, table, levels):
    """Bit-reverse the last axis and run ``levels`` butterfly levels (unnormalized)."""
    n = re.shape[-1]
    order = bit_reverse_order(n)
    re = re[..., order]
    im = im[..., order]
    size = 2
    for _ in range(levels):
        re, im = butterfly_level(re, im, size, table)
        size *= 2
    return re, im


def forward_sum(samples, axis: int = -1) -> np.ndarray:
    """``sum_j f_j e^{-2 pi i k j / N}`` along ``axis``; that is ``N * fft(samples)``."""
    z = np.moveaxis(as_complex_vector(samples, allow_nd=True), axis, -1)
    n = z.shape[-1]
    m = log2_exact(n)
    re, im = split_complex(z)
    re, im = _tree_transform(re, im, twiddle_table(n), m)
    return np.moveaxis(join_complex(re, im), -1, axis)


def normalize(re, im, n: int):
    return re / n, im / n


def fft(samples, axis: int = -1) -> np.ndarray:
    """Normalized radix-2 FFT along ``axis``.

    >>> fft([1, 1, 1, 1]).real.tolist()
    [1.0, 0.0, 0.0, 0.0]
    """
    z = np.moveaxis(as_complex_vector(samples, allow_nd=True), axis, -1)
    n = z.shape[-1]
    m = log2_exact(n)
    re, im = split_complex(z)
    re, im = _tree_transform(re, im, twiddle_table(n), m)
    re, im = normalize(re, im, n)
    return np.moveaxis(join_complex(re, im), -1, axis)


def reverse_index(y: np.ndarray, axis: int = -1) -> np.ndarray:
    """``out[k] = y[(N - k) mod N]`` along ``axis``; index 0 stays put."""
    n = y.shape[axis]
    return np.take(y, (-np.arange(n)) % n, axis=axis)


def ifft(coeffs, axis: int = -1) -> np.ndarray:
    """Inverse transform computed with the forward machinery.

    Evaluating the exponential polynomial at ``2*pi - x_k`` turns the inverse
    sum into a forward one, so the forward sum (``N * fft``) read back in
    reversed index order gives ``p(x_k)``.
    """
    return reverse_index(forward_sum(coeffs, axis=axis), axis=axis)


def eval_exp_poly(coeffs, x: float) -> complex:
    """``p(x) = sum_k c_k e^{ikx}`` by direct summation."""
    c = as_complex_vector(coeffs)
    k = np.arange(c.shape[0])
    return complex(np.sum(c * np.exp(1j * k * x)))
