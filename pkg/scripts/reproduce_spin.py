"""Regenerate the qubit reference table and write it to a file or stdout.

Equivalent to `murel reproduce-spin`, kept as a script so the table can be
committed next to swept variants produced by sweep_detuning.py.
"""
from __future__ import annotations

import argparse
import sys

from murel.reporting import render_csv, render_json_lines, spin_reference_rows


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--out", default="-", help="output path, '-' for stdout")
    args = parser.parse_args(argv)

    rows = spin_reference_rows()
    text = render_csv(rows) if args.format == "csv" else render_json_lines(rows)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {len(rows)} rows to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
