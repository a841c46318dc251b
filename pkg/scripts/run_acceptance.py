#!/usr/bin/env python3
"""Run the ten acceptance criteria and optionally save a JSON report."""
import argparse
import json
import sys

from hermpair.acceptance import run_all


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scale", type=float, default=1.0, help="fraction of the full trial counts")
    ap.add_argument("--json", help="write results here")
    args = ap.parse_args()

    results = run_all(scale=args.scale)
    for r in results:
        print(r.line())
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump([{"number": r.number, "name": r.name, "passed": bool(r.passed),
                        "detail": r.detail} for r in results], fh, indent=2)
    return 0 if all(r.passed for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())
