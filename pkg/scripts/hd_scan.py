"""Scan the Gauss-sum lifting and product laws over small fields.

Usage: python3 scripts/hd_scan.py --primes 3 5 7 --max-degree 3
"""

from __future__ import annotations

import argparse

from charsum import CharSystem, build_tower


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--primes", type=int, nargs="+", default=[3, 5, 7])
    ap.add_argument("--max-degree", type=int, default=3)
    args = ap.parse_args()

    for p in args.primes:
        degrees = tuple(range(1, args.max_degree + 1))
        sysm = CharSystem(build_tower(p, degrees=degrees))
        grp = sysm.tower.group_order(1)
        lift_checked = 0
        for d in degrees[1:]:
            for idx in range(grp):
                assert sysm.check_hd_lift(sysm.character(1, idx), d)
                lift_checked += 1
        divisors = [n for n in range(2, grp + 1) if grp % n == 0]
        prod_checked = 0
        for n in divisors:
            for idx in range(grp):
                assert sysm.check_hd_product(sysm.character(1, idx), n)
                prod_checked += 1
        print(f"p={p}: lifting ok on {lift_checked} (character, degree) "
              f"pairs, product ok on {prod_checked} pairs (n in {divisors})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
