"""``plot <kind> --in CSV... --out IMAGE`` entry point."""

from __future__ import annotations

import argparse
import sys

from .core import KINDS, PlotError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot", description="Render a ceqsim CSV to a figure."
    )
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument(
        "--in", dest="inputs", nargs="+", required=True, metavar="CSV",
        help="input CSV file(s); headers must match the producing command",
    )
    parser.add_argument(
        "--out", dest="output", required=True, metavar="IMAGE",
        help="output image path (.svg preferred, .png accepted)",
    )
    args = parser.parse_args(argv)
    try:
        render(args.kind, args.inputs, args.output)
    except (PlotError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
