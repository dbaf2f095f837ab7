"""figures <kind> --in <dir> --out <dir>: render simulator CSVs to images."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import render
from .schemas import SchemaError

EXIT_OK = 0
EXIT_SCHEMA = 2

_KINDS = {
    "snapshots": render.render_snapshots,
    "fields": render.render_fields,
    "series": render.render_series,
    "convergence": render.render_convergence,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="figures", description="Render figures from stokes-erosion CSV outputs."
    )
    p.add_argument("kind", choices=sorted(_KINDS))
    p.add_argument("--in", dest="indir", required=True, help="run output directory")
    p.add_argument("--out", dest="outdir", required=True, help="figure directory")
    p.add_argument("--format", choices=("png", "svg"), default="png")
    p.add_argument(
        "--linear",
        action="store_true",
        help="linear vertical axes for the series figure (default logarithmic)",
    )
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    kwargs = {"fmt": args.format}
    if args.kind == "series":
        kwargs["logy"] = not args.linear
    try:
        out = _KINDS[args.kind](args.indir, outdir, **kwargs)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    print(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
