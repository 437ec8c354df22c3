"""Command line wrapper: scanplot <csv> <out> [--marker PHI00 PHI10]."""

import argparse
import sys

from . import CsvFormatError, render


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="scanplot",
        description="Render a classical-bound scan CSV as a heatmap.")
    p.add_argument("csv", help="scan CSV produced by `hwsteer scan`")
    p.add_argument("out", help="output image; format chosen by extension")
    p.add_argument("--marker", nargs=2, type=float, metavar=("PHI00", "PHI10"),
                   help="draw a black dot at this point (radians; values "
                        "outside the plotted window are wrapped mod 2*pi)")
    p.add_argument("--dpi", type=int, default=150,
                   help="raster resolution (default 150)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        data = render(args.csv, args.out, marker=args.marker, dpi=args.dpi)
    except CsvFormatError as exc:
        print(f"{args.csv}:{exc.line}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(exc, file=sys.stderr)
        return 1
    print(f"wrote {args.out}  ({data.values.shape[0]}x{data.values.shape[1]} "
          f"cells, range [{data.vmin:.6g}, {data.vmax:.6g}])", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
