"""Multiplication counts for the sequential and the parallel FFT.

A multiplication is one complex twiddle product per butterfly output,
including products by ``w^0 = 1``; a full level over ``N`` points therefore
costs ``N`` and the sequential transform ``N * log2(N)``. The parallel count
follows the critical path: worker branches cost ``2^(m-l)`` per level up to
``m1``, then each reduction level ``m1 + i`` costs ``2^(m1+i)`` on the
single busiest receiver.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction

import numpy as np

from .core_math import log2_exact
from .errors import InvalidParametersError, InvalidSizeError
from .parallel_engine import run_parallel

TABLE1_SIZES = (512, 2048, 8192, 32768)
TABLE1_L = 2


def _check_levels(m: int, l: int) -> None:
    if m < 0 or l < 0:
        raise InvalidParametersError(f"level counts must be nonnegative, got m={m}, l={l}")
    if l > m:
        raise InvalidParametersError(f"more worker levels than tree levels (l={l} > m={m})")


def count_parallel_mults(m: int, l: int) -> int:
    """``(m-l) 2^(m-l) + sum_{i=1..l} 2^(m-l+i)``, exactly.

    >>> count_parallel_mults(9, 2)
    1664
    """
    _check_levels(m, l)
    m1 = m - l
    return m1 * 2**m1 + sum(2 ** (m1 + i) for i in range(1, l + 1))


def count_sequential_mults(N: int) -> int:
    try:
        return N * log2_exact(N)
    except InvalidSizeError as exc:
        raise InvalidParametersError(str(exc)) from None


def _speedup_exact(m: int, l: int) -> Fraction:
    _check_levels(m, l)
    if m == 0:
        return Fraction(1)
    denom = Fraction(m - l, 2**l) + sum(Fraction(2**i, 2**l) for i in range(1, l + 1))
    return Fraction(m) / denom


def speedup_ratio(m: int, l: int) -> float:
    """How many times fewer products the parallel critical path needs.

    ``m / ((m-l) 2^-l + sum_{i=1..l} 2^(i-l))``; 1.0 when ``l == 0``.
    """
    return float(_speedup_exact(m, l))


def round_half_up(x, places: int = 2) -> Decimal:
    q = Decimal(1).scaleb(-places)
    if isinstance(x, Fraction):
        d = Decimal(x.numerator) / Decimal(x.denominator)
    else:
        d = Decimal(repr(float(x)))
    return d.quantize(q, rounding=ROUND_HALF_UP)


@dataclass(frozen=True)
class CountReport:
    N: int
    n_squared: int
    seq_mults: int
    par_mults: int
    ratio: float
    measured: int | None = None

    @property
    def rsp(self) -> Decimal:
        """Ratio rounded half-up to two decimals."""
        return round_half_up(Fraction(self.seq_mults, self.par_mults))

    def record(self) -> dict:
        rec = {"N": self.N, "N2": self.n_squared, "NlogN": self.seq_mults, "Pfp": self.par_mults, "RSP": float(self.rsp)}
        if self.measured is not None:
            rec["measured"] = self.measured
        return rec


def count_report(N: int, l: int, measured: int | None = None) -> CountReport:
    m = log2_exact(N)
    return CountReport(
        N=N,
        n_squared=N * N,
        seq_mults=count_sequential_mults(N),
        par_mults=count_parallel_mults(m, l),
        ratio=speedup_ratio(m, l),
        measured=measured,
    )


def table1_report(sizes=TABLE1_SIZES, l: int = TABLE1_L) -> list[CountReport]:
    """Counts for each size with ``2**l`` workers (defaults: the four-worker table)."""
    return [count_report(N, l) for N in sizes]


def measured_mult_count(N: int, nproc: int, seed: int = 0) -> int:
    """Run the parallel engine with per-worker product counters and sum the critical path."""
    rng = np.random.default_rng(seed)
    samples = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    return run_parallel(samples, nproc).critical_path_mults()


def format_table(reports: list[CountReport]) -> str:
    has_measured = any(r.measured is not None for r in reports)
    header = ["N", "N^2", "NLog2N", "Pfp", "RSP"] + (["measured"] if has_measured else [])
    rows = []
    for r in reports:
        row = [str(r.N), str(r.n_squared), str(r.seq_mults), str(r.par_mults), f"{r.rsp:.2f}"]
        if has_measured:
            row.append("-" if r.measured is None else str(r.measured))
        rows.append(row)
    widths = [max(len(h), *(len(row[i]) for row in rows)) for i, h in enumerate(header)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in rows]
    return "\n".join(lines)


def format_records(reports: list[CountReport]) -> str:
    """One JSON object per line."""
    return "\n".join(json.dumps(r.record()) for r in reports)
