#!/usr/bin/env python3
"""Print the reproduction table for the worked examples; exit 1 if any row fails."""

import argparse
import sys

from vfieldlab.claims import run_checks
from vfieldlab.flow import IntegratorConfig


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--exact-only", action="store_true")
    ap.add_argument("--rtol", type=float, default=1e-10)
    ap.add_argument("--atol", type=float, default=1e-12)
    args = ap.parse_args()
    rows = run_checks(numeric=not args.exact_only, cfg=IntegratorConfig(rtol=args.rtol, atol=args.atol))
    width = max(len(r.location) for r in rows)
    for r in rows:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.location:<{width}}  {r.claim}\n      {r.computed}")
    return 0 if all(r.passed for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
