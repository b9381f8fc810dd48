"""Command line for rendering frictionlab report figures."""

from __future__ import annotations

import argparse
import sys

from .render import FIGURE_KINDS, FigureSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="frictionplots",
                                 description="Render figures from frictionlab outputs")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure from a report or table")
    p.add_argument("--report", required=True,
                   help="report.json (mixing-hist, ks-trend) or scale CSV (scale-overlay)")
    p.add_argument("--kind", required=True, choices=FIGURE_KINDS)
    p.add_argument("--out", required=True, help="output image path (.png or .svg)")
    p.add_argument("--title", default="", help="figure title override")
    p.add_argument("--bins", type=int, default=16, help="histogram bins (mixing-hist)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(report=args.report, kind=args.kind, out=args.out,
                      title=args.title, bins=args.bins)
    try:
        out = render(spec)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
