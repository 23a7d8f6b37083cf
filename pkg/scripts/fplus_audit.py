"""Audit the printed F+(2^j) fixture matrices: determinant, cokernel, boundary."""

import argparse
import json

from treelike.realize import fplus_audit


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-j", type=int, default=4)
    ap.add_argument("--json", action="store_true", help="emit one JSON record per j")
    args = ap.parse_args()
    for j in range(1, args.max_j + 1):
        au = fplus_audit(j)
        if args.json:
            print(json.dumps({"j": j, "det": au.det, "divisors": list(au.divisors), "matches": au.matches}))
        else:
            print(au.report())


if __name__ == "__main__":
    main()
