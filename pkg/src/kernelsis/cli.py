"""Command-line interface: ``kernelsis gen-kernel | split | combine | analyze``.

Exit codes::

    0  success
    2  parameter error (bad flags, impossible k/n, invalid kernel)
    3  format error (malformed PGM/PBM/KSIS, inconsistent share lists)
    4  insufficient shares
    5  possible forged share (pooled kernel shares reconstruct an invalid kernel)
    6  metadata mismatch between share files
    7  reconstruction failure (image shares are corrupt)
    8  I/O error
"""

from __future__ import annotations

import argparse
import io
import os
import sys
import tempfile
from pathlib import Path

from . import analysis, codec, scheme
from .errors import (
    ForgedShareError,
    FormatError,
    InsufficientSharesError,
    InvalidInputError,
    MetadataMismatchError,
    ParameterError,
    ReconstructionError,
    SharingError,
)
from .kernel import coefficient_of_incidence, generate_kernel, traversal_order

EXIT_OK = 0
EXIT_PARAMETER = 2
EXIT_FORMAT = 3
EXIT_INSUFFICIENT = 4
EXIT_FORGED = 5
EXIT_MISMATCH = 6
EXIT_RECONSTRUCTION = 7
EXIT_IO = 8

# most specific first
_EXIT_CODES = (
    (ForgedShareError, EXIT_FORGED),
    (ReconstructionError, EXIT_RECONSTRUCTION),
    (InsufficientSharesError, EXIT_INSUFFICIENT),
    (MetadataMismatchError, EXIT_MISMATCH),
    (FormatError, EXIT_FORMAT),
    (InvalidInputError, EXIT_FORMAT),
    (ParameterError, EXIT_PARAMETER),
    (SharingError, EXIT_PARAMETER),
)

MODE_ALIASES = {"wu": "wu257", "tl251": "thienlin251"}


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _sizes(text: str) -> list[int]:
    try:
        sizes = [int(s) for s in text.split(",") if s]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not sizes or min(sizes) < 1:
        raise argparse.ArgumentTypeError("image sizes must be positive")
    return sizes


def _write_atomic(files: dict) -> None:
    """Write every ``path -> bytes`` pair, or none of them."""
    staged = []
    try:
        for path, data in files.items():
            path = Path(path)
            fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
            staged.append((tmp, path))
        for tmp, path in staged:
            os.replace(tmp, path)
    finally:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.unlink(tmp)


def cmd_gen_kernel(args) -> int:
    mode = "cyclic" if args.cyclic else "uniform"
    kernel = generate_kernel(args.rows, args.cols, args.k, mode=mode, rng=args.seed)
    _write_atomic({args.output: codec.write_pbm(kernel)})
    print(f"C = {coefficient_of_incidence(kernel)}")
    return EXIT_OK


def cmd_split(args) -> int:
    image = codec.read_pgm(Path(args.image).read_bytes())
    kernel = codec.read_pbm(Path(args.kernel).read_bytes(), args.k)
    mode = MODE_ALIASES[args.mode]
    bundles = scheme.split(image, kernel, args.k, args.n, mode=mode, rng=args.seed)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    _write_atomic({out / f"share_{b.x}.ksis": codec.encode_bundle(b) for b in bundles})
    plan = traversal_order(kernel, image.shape[1], image.shape[0])
    print(f"M = {bundles[0].share_size}")
    print(f"fillers = {plan.filler_count}")
    return EXIT_OK


def cmd_combine(args) -> int:
    bundles = [codec.decode_bundle(Path(p).read_bytes()) for p in args.shares]
    image = scheme.combine(bundles)
    _write_atomic({args.output: codec.write_pgm(image)})
    return EXIT_OK


def cmd_coi(args) -> int:
    kernel = codec.read_pbm(Path(args.kernel).read_bytes())
    print(coefficient_of_incidence(kernel))
    return EXIT_OK


def cmd_c_ratio(args) -> int:
    rows, r = analysis.c_ratio_experiment(
        samples=args.samples,
        kernel_dims=(args.rows, args.cols),
        k_range=(args.k_min, args.k_max),
        image_sizes=args.sizes,
        rng=args.seed,
    )
    if args.csv == "-":
        analysis.write_csv(rows, sys.stdout)
    elif args.csv:
        buf = io.StringIO()
        analysis.write_csv(rows, buf)
        _write_atomic({args.csv: buf.getvalue().encode()})
    print(f"pearson_r = {r:.4f}")
    return EXIT_OK


def cmd_attack(args) -> int:
    bundle = codec.decode_bundle(Path(args.share).read_bytes())
    plan = None
    if args.kernel:
        kernel = codec.read_pbm(Path(args.kernel).read_bytes(), bundle.k)
        plan = traversal_order(kernel, bundle.image_width, bundle.image_height)
    truth = codec.read_pgm(Path(args.truth).read_bytes()) if args.truth else None
    report = analysis.correlation_attack(
        bundle, bundle.k, width=bundle.image_width, height=bundle.image_height, plan=plan, ground_truth=truth
    )
    if args.output:
        _write_atomic({args.output: codec.write_pgm(report.estimated_image)})
    if report.pearson_correlation is not None:
        print(f"pearson_r = {report.pearson_correlation:.4f}")
    return EXIT_OK


def cmd_probabilities(args) -> int:
    probs = analysis.guess_probabilities(args.k, args.S, args.M, args.p)
    print(f"log2 Pr(kernel) = {probs.log2_kernel:g}")
    print(f"log2 Pr(image) = {probs.log2_image:g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kernelsis", description="Randomized-kernel secret image sharing.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-kernel", help="generate a kernel as a plain PBM")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--cyclic", action="store_true", help="place ones on a cyclic subgroup of cell indices")
    p.add_argument("--seed", type=_seed)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen_kernel)

    p = sub.add_parser("split", help="split a PGM image into n KSIS share files")
    p.add_argument("--image", required=True)
    p.add_argument("--kernel", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=sorted(MODE_ALIASES), default="wu")
    p.add_argument("--seed", type=_seed)
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("combine", help="rebuild the PGM image from k or more share files")
    p.add_argument("shares", nargs="+")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_combine)

    p = sub.add_parser("analyze", help="security and share-size analysis")
    asub = p.add_subparsers(dest="analysis", required=True)

    a = asub.add_parser("coi", help="coefficient of incidence of a kernel")
    a.add_argument("kernel")
    a.set_defaults(func=cmd_coi)

    a = asub.add_parser("c-ratio", help="C versus randomness ratio over random kernels")
    a.add_argument("--samples", type=int, default=100)
    a.add_argument("--rows", type=int, default=45)
    a.add_argument("--cols", type=int, default=45)
    a.add_argument("--k-min", type=int, default=2)
    a.add_argument("--k-max", type=int, default=8)
    a.add_argument("--sizes", type=_sizes, default=[32, 64, 128, 256], help="square image sides, comma-separated")
    a.add_argument("--seed", type=_seed)
    a.add_argument("--csv", help="CSV output path, '-' for stdout")
    a.set_defaults(func=cmd_c_ratio)

    a = asub.add_parser("attack", help="single-share correlation attack on a KSIS file")
    a.add_argument("share")
    a.add_argument("--truth", help="ground-truth PGM for the correlation")
    a.add_argument("--kernel", help="lay estimates out along this kernel's traversal")
    a.add_argument("-o", "--output", help="write the estimated image as PGM")
    a.set_defaults(func=cmd_attack)

    a = asub.add_parser("probabilities", help="guessing probabilities for kernel and image shares")
    a.add_argument("--k", type=int, required=True)
    a.add_argument("--S", type=int, required=True, help="kernel size rows*cols")
    a.add_argument("--M", type=int, required=True, help="share size")
    a.add_argument("--p", type=int, default=251)
    a.set_defaults(func=cmd_probabilities)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SharingError as exc:
        for cls, code in _EXIT_CODES:
            if isinstance(exc, cls):
                print(f"kernelsis: {type(exc).__name__}: {exc}", file=sys.stderr)
                return code
        raise
    except OSError as exc:
        print(f"kernelsis: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
