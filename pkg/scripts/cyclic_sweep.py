"""Realize every admissible cyclic form q^theta_{p^j} up to a bound and report tree sizes."""

import argparse
import math
import time
from dataclasses import dataclass

from treelike.realize import cyclic_tree


@dataclass(frozen=True)
class SweepConfig:
    max_order: int = 64
    primes: tuple[int, ...] = (2, 3, 5, 7, 11, 13)


def sweep(cfg: SweepConfig):
    for p in cfg.primes:
        j = 1
        while p**j <= cfg.max_order:
            pj = p**j
            thetas = [t for t in range(-pj + 1, pj) if math.gcd(t, p) == 1]
            start = time.perf_counter()
            sizes = [cyclic_tree(p, j, t).tree.n for t in thetas]
            yield p, j, len(thetas), max(sizes), time.perf_counter() - start
            j += 1


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-order", type=int, default=SweepConfig.max_order)
    ap.add_argument("--primes", type=lambda s: tuple(int(x) for x in s.split(",")), default=SweepConfig.primes)
    args = ap.parse_args()
    print(f"{'p^j':>8} {'forms':>6} {'max n':>6} {'seconds':>8}")
    for p, j, count, n, secs in sweep(SweepConfig(args.max_order, args.primes)):
        print(f"{f'{p}^{j}':>8} {count:>6} {n:>6} {secs:>8.3f}")


if __name__ == "__main__":
    main()
