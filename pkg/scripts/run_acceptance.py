"""Run every verification suite and print one pass/fail line per criterion."""

import argparse
import sys

from supercontact.verification import SUITES, VerifyConfig, run_suite


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=VerifyConfig.seed)
    ap.add_argument("--verbose", action="store_true", help="list the failing checks")
    args = ap.parse_args()
    cfg = VerifyConfig(seed=args.seed)
    ok = True
    for n, name in enumerate(SUITES, start=1):
        res = run_suite(name, cfg)
        ok &= res.passed
        print(f"criterion {n:2d} {'PASS' if res.passed else 'FAIL'}  {name:18s} {res.seconds:6.1f} s")
        if args.verbose:
            for c in res.failures():
                print(f"    failed: {c.name}  {c.detail}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
