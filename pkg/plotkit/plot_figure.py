#!/usr/bin/env python3
"""Render one figure recipe from a sweep CSV.

    plot_figure.py --recipe fig8 --in sweep.csv --out fig8.png
"""

import argparse
import sys

from plotkit import MissingColumnError, get_recipe, render


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--recipe", required=True)
    ap.add_argument("--in", dest="csv_path", required=True, metavar="CSV")
    ap.add_argument("--out", required=True, metavar="IMAGE")
    args = ap.parse_args(argv)
    try:
        recipe = get_recipe(args.recipe)
        render(recipe, args.csv_path, args.out)
    except (KeyError, ValueError, OSError, MissingColumnError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
