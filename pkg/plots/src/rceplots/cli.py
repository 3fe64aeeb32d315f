"""Batch figure rendering from experiment CSVs.

Usage: rceplots {exp1,exp2,exp3} --csv FILE --out-dir DIR [--formats pdf,png]
"""

from __future__ import annotations

import argparse
import sys

from .figures import FigureSpec, SchemaError, plot, write_figure_manifest


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rceplots",
                                     description="Render figures from experiment CSVs")
    sub = parser.add_subparsers(dest="command", required=True)
    for which in (1, 2, 3):
        p = sub.add_parser(f"exp{which}", help=f"figures for experiment {which} CSVs")
        p.add_argument("--csv", required=True, help="experiment CSV file")
        p.add_argument("--out-dir", required=True, help="directory for emitted figures")
        p.add_argument("--formats", default="pdf,png",
                       help="comma list among pdf, png, svg")
        p.set_defaults(experiment=which)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(
            experiment=args.experiment,
            csv_path=args.csv,
            out_dir=args.out_dir,
            formats=tuple(f.strip() for f in args.formats.split(",") if f.strip()),
        )
        result = plot(spec)
        manifest = write_figure_manifest(spec, result)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {len(result.files)} figures and {manifest}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
