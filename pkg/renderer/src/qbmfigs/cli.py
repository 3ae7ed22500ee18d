"""CLI: render --kind <timeseries|colormap|legend-triangle> --in <csv> --out <png>."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import DEFAULT_TIMESERIES_COLUMNS, KINDS, FigureSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render", description="Render figures from simulator CSV outputs."
    )
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--in", dest="source", type=Path, help="input CSV file")
    parser.add_argument("--out", required=True, type=Path, help="output image file")
    parser.add_argument(
        "--columns",
        default=",".join(DEFAULT_TIMESERIES_COLUMNS),
        help="comma-separated time-series columns to plot",
    )
    parser.add_argument("--xlabel")
    parser.add_argument("--ylabel")
    parser.add_argument("--title")
    parser.add_argument("--xlim", help="min,max")
    parser.add_argument("--ylim", help="min,max")
    parser.add_argument("--dpi", type=int, default=150)
    return parser


def _limits(text: str | None) -> tuple[float, float] | None:
    if text is None:
        return None
    parts = text.split(",")
    if len(parts) != 2:
        raise SchemaError(f"axis limits must be 'min,max', got {text!r}")
    return float(parts[0]), float(parts[1])


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(
            kind=args.kind,
            out=args.out,
            source=args.source,
            columns=tuple(c.strip() for c in args.columns.split(",") if c.strip()),
            xlabel=args.xlabel,
            ylabel=args.ylabel,
            title=args.title,
            xlim=_limits(args.xlim),
            ylim=_limits(args.ylim),
            dpi=args.dpi,
        )
        out = render(spec)
    except (SchemaError, ValueError) as exc:
        print(f"render error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
