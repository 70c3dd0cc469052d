"""Command line: render one figure from an aggregated sweep CSV.

    rlncs-plot --csv agg.csv --kind tnmse --out fig.png
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import MissingColumnError, render, spec_for_kind


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="rlncs-plot")
    parser.add_argument("--csv", type=Path, required=True,
                        help="aggregated sweep table (agg.csv schema)")
    parser.add_argument("--kind", required=True,
                        choices=["tnmse", "recall", "actions"])
    parser.add_argument("--out", type=Path, required=True, help="output image path")
    args = parser.parse_args(argv)
    try:
        out = render(spec_for_kind(args.csv, args.kind, args.out))
    except (MissingColumnError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
