"""vortexplot: render figures from vortexfield files.

Exit codes: 0 success, 1 validation/file error.
"""

from __future__ import annotations

import argparse
import sys

from .reader import ReadError
from .render import KINDS, PlotRequest, RenderError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="vortexplot")
    parser.add_argument("--field", required=True, help="vortexfield v1 file")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--window", default=None,
                        help="rmin,rmax,zmin,zmax (default: whole domain)")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--fill", action="store_true",
                        help="filled contours for the contour-* kinds")
    args = parser.parse_args(argv)

    window = None
    if args.window:
        try:
            parts = [float(x) for x in args.window.split(",")]
            if len(parts) != 4:
                raise ValueError
            window = tuple(parts)
        except ValueError:
            print(f"error: bad --window {args.window!r}, want rmin,rmax,zmin,zmax",
                  file=sys.stderr)
            return 1
    try:
        render(PlotRequest(field_path=args.field, kind=args.kind,
                           out_path=args.out, window=window, fill=args.fill))
    except (RenderError, ReadError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
