"""Command-line front end.

Exit codes: 2 bad flags, 3 I/O failure, 4 corrupt or unusable input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import baseline, codec
from .errors import CorruptStreamError, UsageError
from .experiment import run_experiment, to_csv
from .grid import Alphabet, GridArray, read_pgm, read_raw, write_pgm, write_raw
from .parser import Threshold, parse
from .sources import load_spec, sample
from .stats import choose_k, empirical_distribution, entropy
from .visualize import render_pgm, render_svg

EXIT_FLAGS, EXIT_IO, EXIT_CORRUPT = 2, 3, 4


class CLIError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _flag(fn, *args):
    try:
        return fn(*args)
    except UsageError as exc:
        raise CLIError(str(exc), EXIT_FLAGS) from exc


def _shape(text: str | None) -> tuple | None:
    if text is None:
        return None
    try:
        return tuple(int(v) for v in text.lower().split("x"))
    except ValueError as exc:
        raise CLIError(f"bad --shape {text!r}, expected e.g. 64x64", EXIT_FLAGS) from exc


def _is_pgm(path: Path) -> bool:
    if path.suffix.lower() == ".pgm":
        return True
    with open(path, "rb") as f:
        return f.read(2) == b"P5"


def load_input(args) -> GridArray:
    path = Path(args.input)
    if not path.is_file():
        raise CLIError(f"cannot read {path}", EXIT_IO)
    try:
        if _is_pgm(path):
            if args.dims != 2:
                raise CLIError("PGM input is 2-dimensional; use --dims 2", EXIT_FLAGS)
            return read_pgm(path, args.alphabet)
        alphabet = _flag(Alphabet, args.alphabet)
        shape = _shape(args.shape)
        if shape is None:
            count = path.stat().st_size // np.dtype(alphabet.dtype).itemsize
            side = round(count ** (1.0 / args.dims))
            for s in (side - 1, side, side + 1):
                if s > 0 and s ** args.dims == count:
                    shape = (s,) * args.dims
            if shape is None:
                raise CLIError(f"{path}: {count} symbols is not a {args.dims}-d cube; "
                               "pass --shape", EXIT_FLAGS)
        elif len(shape) != args.dims:
            raise CLIError("--shape disagrees with --dims", EXIT_FLAGS)
        return read_raw(path, shape, alphabet)
    except UsageError as exc:
        raise CLIError(f"{path}: {exc}", EXIT_CORRUPT) from exc


def _write_array(path: str, x: GridArray) -> None:
    if path.lower().endswith(".pgm"):
        write_pgm(path, x)
    else:
        write_raw(path, x)


def _print_csv(header, row) -> None:
    print(",".join(header))
    print(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))


def cmd_compress(args) -> None:
    phi = _flag(Threshold.parse, args.phi)
    x = load_input(args)
    n = max(x.extents)
    if args.baseline:
        data = _flag(baseline.encode_baseline, x, args.k)
        h = baseline.read_header(data)
        events = (n // h["k"]) ** x.d
        bits, rate = h["bits"], baseline.baseline_rate(data)
    else:
        data, evs = codec.encode_events(x, phi, seal=not args.no_flush, pointers=args.pointers)
        events = len(evs)
        bits, rate = codec.read_header(data).payload_bits, codec.code_rate(data)
    Path(args.output).write_bytes(data)
    _print_csv(("n", "events", "payload_bits", "rate"), (n, events, bits, rate))


def decode_container(data: bytes) -> GridArray:
    if data[:4] == baseline.MAGIC:
        return baseline.decode_baseline(data)
    header = codec.read_header(data)
    x = codec.decode(data, partial=True)
    if x.extents[0] < header.n and not header.flushed:
        print(f"warning: unflushed container, only Λ_{x.extents[0]} is decodable",
              file=sys.stderr)
    return x


def cmd_decompress(args) -> None:
    data = Path(args.input).read_bytes()
    try:
        x = decode_container(data)
    except CorruptStreamError as exc:
        raise CLIError(f"{type(exc).__name__}: {exc}", EXIT_CORRUPT) from exc
    _write_array(args.output, x)


def _largest_cube(x: GridArray) -> GridArray:
    return x.cropped((min(x.extents),) * x.d)


def cmd_stats(args) -> None:
    x = _largest_cube(load_input(args))
    n = x.extents[0]
    k = args.k if args.k else (choose_k(n, x.d, x.alphabet.size) if n >= 2 else 1)
    dist = _flag(empirical_distribution, x, k)
    H = entropy(dist, x.alphabet)
    _print_csv(("k", "distinct", "H", "h"), (k, dist.distinct, H, H / k ** x.d))


def _spec(args):
    return _flag(lambda: load_spec(args.source, n=args.size, d=args.dims_override,
                                   A=args.alphabet_override, seed=args.seed))


def cmd_gen(args) -> None:
    spec = _spec(args)
    _write_array(args.output, _flag(sample, spec))


def cmd_experiment(args) -> None:
    spec = _spec(args)
    phi = _flag(Threshold.parse, args.phi)
    try:
        sizes = [int(s) for s in args.sizes.split(",")]
    except ValueError as exc:
        raise CLIError(f"bad --sizes {args.sizes!r}", EXIT_FLAGS) from exc
    rows = run_experiment(spec, str(phi), sizes, args.trials, args.jobs, args.pointers)
    text = to_csv(rows)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_visualize(args) -> None:
    if args.dims != 2:
        raise CLIError("visualize needs --dims 2", EXIT_FLAGS)
    phi = _flag(Threshold.parse, args.phi)
    x = load_input(args)
    if x.d != 2:
        raise CLIError("visualize needs a 2-dimensional input", EXIT_FLAGS)
    x = x.padded()
    _, events = parse(x, phi)
    if args.output.lower().endswith(".svg"):
        Path(args.output).write_text(render_svg(x, events))
    else:
        Path(args.output).write_bytes(render_pgm(x, events, args.scale))


def _array_flags(p, dims=True):
    p.add_argument("--input", required=True)
    if dims:
        p.add_argument("--dims", type=int, default=2)
    p.add_argument("--alphabet", type=int, default=2)
    p.add_argument("--shape", help="extents of a raw input, e.g. 64x48")


def _source_flags(p):
    p.add_argument("--source", required=True, help="key=value pairs or a file holding them")
    p.add_argument("--size", type=int)
    p.add_argument("--dims", dest="dims_override", type=int)
    p.add_argument("--alphabet", dest="alphabet_override", type=int)
    p.add_argument("--seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sru", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compress", help="encode an array into a container")
    _array_flags(p)
    p.add_argument("--output", required=True)
    p.add_argument("--phi", default="1/2")
    p.add_argument("--baseline", action="store_true", help="regular k-block dictionary codec")
    p.add_argument("--k", type=int, help="baseline block side (default: choose_k)")
    p.add_argument("--no-flush", action="store_true", help="leave the last partial shell unparsed")
    p.add_argument("--pointers", choices=codec.POINTER_MODES, default="rank")
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("decompress", help="decode an SRU1 or SRB1 container")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_decompress)

    p = sub.add_parser("stats", help="empirical k-block entropy")
    _array_flags(p)
    p.add_argument("--k", type=int)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("gen", help="sample a synthetic source")
    _source_flags(p)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("experiment", help="rate versus size on a synthetic source")
    _source_flags(p)
    p.add_argument("--phi", default="1/2")
    p.add_argument("--sizes", default="64,128,256,512")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--pointers", choices=codec.POINTER_MODES, default="rank")
    p.add_argument("--output")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("visualize", help="draw the parse of a 2-d array")
    _array_flags(p)
    p.add_argument("--phi", default="1/2")
    p.add_argument("--output", required=True, help=".svg or .pgm")
    p.add_argument("--scale", type=int)
    p.set_defaults(func=cmd_visualize)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except CLIError as exc:
        print(f"sru: {exc}", file=sys.stderr)
        return exc.code
    except CorruptStreamError as exc:
        print(f"sru: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CORRUPT
    except UsageError as exc:
        print(f"sru: {exc}", file=sys.stderr)
        return EXIT_CORRUPT
    except OSError as exc:
        print(f"sru: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
