"""Radix-2 FFT with a message-passing worker engine, operation-count model and image filtering."""

from .complexity import (
    CountReport,
    count_parallel_mults,
    count_sequential_mults,
    measured_mult_count,
    speedup_ratio,
    table1_report,
)
from .core_math import TwiddleTable, bit_reverse_order, twiddle_table
from .errors import (
    CorruptMessageError,
    FFTError,
    InvalidInputError,
    InvalidParametersError,
    InvalidSizeError,
    InvalidTopologyError,
    PGMError,
    RunError,
)
from .fft2d import dft2d_oracle, fft2d, ifft2d
from .fft_seq import dft_oracle, eval_exp_poly, fft, ifft
from .image_pipeline import FilterSpec, build_filter_mask, filter_image, pad_pow2, spectrum
from .parallel_engine import pack_message, parallel_fft, plan_topology, unpack_message
from .pgm import GrayImage, read_pgm, write_pgm

__version__ = "0.1.0"
