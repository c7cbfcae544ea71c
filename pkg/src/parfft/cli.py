"""Command-line interface: ``parfft {fft1d,bench,filter,spectrum}``."""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import complexity
from .core_math import is_power_of_two, log2_exact
from .errors import FFTError, InvalidSizeError, InvalidTopologyError
from .fft2d import fft2d
from .fft_seq import fft, ifft, reverse_index
from .image_pipeline import FilterSpec, MODES, LOW_PASS, center_shift, filter_image, log_spectrum_image, pad_pow2, spectrum
from .parallel_engine import parallel_fft
from .pgm import load_pgm, save_pgm

log = logging.getLogger("parfft")

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

# bench cross-checks the model against instrumentation only up to this size
MEASURE_LIMIT = 2**10


class InputParseError(Exception):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _parse_token(tok: str, lineno: int) -> complex:
    try:
        if "," in tok:
            re_s, im_s = tok.split(",")
            z = complex(float(re_s), float(im_s))
        else:
            z = complex(float(tok), 0.0)
    except ValueError:
        raise InputParseError(lineno, f"cannot parse {tok!r} as a number") from None
    if not np.isfinite(z):
        raise InputParseError(lineno, f"non-finite value {tok!r}")
    return z


def _looks_like_pairs(lines) -> bool:
    rows = [ln.split() for _, ln in lines if ln.split()]
    return len(rows) >= 2 and all(len(t) == 2 and "," not in t[0] + t[1] for t in rows)


def parse_samples(text: str, fmt: str = "auto") -> np.ndarray:
    """Parse samples from text.

    ``real``: whitespace-separated reals or ``re,im`` tokens. ``pairs``: one
    ``re im`` pair per line, the format ``fft1d`` writes. ``auto`` picks
    ``pairs`` when there are at least two non-empty lines and each holds
    exactly two plain tokens.
    """
    lines = list(enumerate(text.splitlines(), start=1))
    if fmt == "auto":
        fmt = "pairs" if _looks_like_pairs(lines) else "real"
    values = []
    for lineno, line in lines:
        toks = line.split()
        if not toks:
            continue
        if fmt == "pairs":
            if len(toks) != 2:
                raise InputParseError(lineno, f"expected 're im', got {len(toks)} fields")
            re_, im_ = (_parse_token(t, lineno) for t in toks)
            if re_.imag or im_.imag:
                raise InputParseError(lineno, "pair fields must be plain reals")
            values.append(complex(re_.real, im_.real))
        else:
            values.extend(_parse_token(t, lineno) for t in toks)
    return np.array(values, dtype=np.complex128)


def _fmt(x: float) -> str:
    return format(float(x) + 0.0, ".17g")


def format_coeffs(z) -> str:
    return "".join(f"{_fmt(c.real)} {_fmt(c.imag)}\n" for c in z)


def _nproc_type(text: str) -> int:
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not is_power_of_two(k):
        raise argparse.ArgumentTypeError(f"worker count must be a power of two, got {k}")
    return k


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def run_fft1d(args) -> int:
    try:
        samples = parse_samples(_read_text(args.input), args.format)
    except InputParseError as exc:
        print(f"parfft fft1d: parse error at {exc}", file=sys.stderr)
        return EXIT_FAIL
    n = samples.shape[0]
    if not is_power_of_two(n):
        print(f"usage error: sample count must be a power of two, got {n}", file=sys.stderr)
        return EXIT_USAGE
    if args.nproc > n:
        print(f"usage error: --nproc {args.nproc} exceeds sample count {n}", file=sys.stderr)
        return EXIT_USAGE

    if args.nproc == 1:
        out = ifft(samples) if args.inverse else fft(samples)
    elif args.inverse:
        out = reverse_index(parallel_fft(samples, args.nproc) * n)
    else:
        out = parallel_fft(samples, args.nproc)
    _write_text(args.output, format_coeffs(out))
    return EXIT_OK


def run_bench(args) -> int:
    l = args.l
    sizes = args.sizes
    for N in sizes:
        if not is_power_of_two(N) or log2_exact(N) < l:
            print(f"usage error: size {N} must be a power of two with log2(N) >= l={l}", file=sys.stderr)
            return EXIT_USAGE
    reports = []
    ok = True
    for N in sizes:
        measured = None
        if N <= MEASURE_LIMIT:
            measured = complexity.measured_mult_count(N, 2**l)
        rep = complexity.count_report(N, l, measured=measured)
        if measured is not None and measured != rep.par_mults:
            log.error("N=%d: predicted %d products, measured %d", N, rep.par_mults, measured)
            ok = False
        reports.append(rep)
    if args.json:
        print(complexity.format_records(reports))
    else:
        print(f"Multiplication counts, {2**l} worker(s) (l={l})")
        print(complexity.format_table(reports))
    return EXIT_OK if ok else EXIT_FAIL


def run_filter(args) -> int:
    image = load_pgm(args.input)
    spec = FilterSpec(b=args.b, c1=args.c1, c2=args.c2, mode=args.mode)
    result = filter_image(image, spec, nproc=args.nproc if args.nproc > 1 else None)
    n, m = result.padded_shape
    print(
        f"processing grid {n}x{m}; output {image.height}x{image.width}; "
        f"max discarded imaginary part {result.max_imag_residual:.3g}"
    )
    save_pgm(result.image, args.output)
    if args.spectrum_out:
        save_pgm(result.spectrum_image, args.spectrum_out)
    return EXIT_OK


def run_spectrum(args) -> int:
    image = load_pgm(args.input)
    padded = pad_pow2(image)
    F = fft2d(padded.grid, nproc=args.nproc if args.nproc > 1 else None)
    save_pgm(log_spectrum_image(spectrum(center_shift(F))), args.output)
    print(f"spectrum grid {F.shape[0]}x{F.shape[1]}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="parfft", description="Radix-2 FFT with a message-passing worker engine.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fft1d", help="transform a text file of samples")
    p.add_argument("input", help="file of whitespace-separated reals or re,im pairs ('-' for stdin)")
    p.add_argument("-o", "--output", help="output file (default stdout)")
    p.add_argument("--inverse", action="store_true", help="apply the inverse transform")
    p.add_argument("--format", choices=("auto", "real", "pairs"), default="auto", help="input layout")
    p.add_argument("--nproc", type=_nproc_type, default=1)
    p.set_defaults(func=run_fft1d)

    p = sub.add_parser("bench", help="multiplication-count table")
    p.add_argument("--l", type=int, default=complexity.TABLE1_L, help="log2 of the worker count")
    p.add_argument("--sizes", type=int, nargs="+", default=list(complexity.TABLE1_SIZES))
    p.add_argument("--json", action="store_true", help="one JSON record per row")
    p.set_defaults(func=run_bench)

    p = sub.add_parser("filter", help="disk filter a PGM image in the frequency domain")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--b", type=float, required=True, help="filter radius in pixels")
    p.add_argument("--mode", choices=MODES, default=LOW_PASS)
    p.add_argument("--c1", type=float, help="disk centre row (default N/2)")
    p.add_argument("--c2", type=float, help="disk centre column (default M/2)")
    p.add_argument("--spectrum-out", help="also write the log-scaled spectrum here")
    p.add_argument("--nproc", type=_nproc_type, default=1)
    p.set_defaults(func=run_filter)

    p = sub.add_parser("spectrum", help="write the log-scaled centred spectrum of a PGM image")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--nproc", type=_nproc_type, default=1)
    p.set_defaults(func=run_spectrum)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "bench" and args.l < 0:
        parser.error("--l must be nonnegative")
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except (InvalidSizeError, InvalidTopologyError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FFTError, OSError) as exc:
        print(f"parfft {args.command}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
