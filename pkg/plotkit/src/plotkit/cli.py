"""plotkit command line: render one or more plot spec files."""

from __future__ import annotations

import argparse
import sys

from .render import render
from .specs import SpecError, load_plot_spec


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Render figures from simulation metrics and summary CSVs",
    )
    parser.add_argument("specs", nargs="+", help="plot spec YAML files")
    args = parser.parse_args(argv)

    status = 0
    for spec_path in args.specs:
        try:
            out = render(load_plot_spec(spec_path))
        except SpecError as e:
            print(f"error: {spec_path}: {e}", file=sys.stderr)
            status = 1
            continue
        print(f"wrote {out}")
    return status


if __name__ == "__main__":
    sys.exit(main())
