"""Solve one monomial Fourier transform and sweep its twisted moments.

Usage: python3 scripts/transform_demo.py -p 7 -n 3 -1 --orders 1 3 -a 1
The i-th entry of --orders is the order of the i-th coordinate character
(1 means trivial).
"""

from __future__ import annotations

import argparse

from charsum import (
    CharSystem,
    MonomialDatum,
    build_tower,
    solve_monomial_transform,
    sweep_twisted_moments,
)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-p", type=int, required=True)
    ap.add_argument("-s", type=int, default=1)
    ap.add_argument("-n", type=int, nargs="+", required=True,
                    help="monomial exponents, one per coordinate")
    ap.add_argument("--orders", type=int, nargs="+", required=True)
    ap.add_argument("-a", type=int, default=1)
    ap.add_argument("--depth", type=int, default=2)
    args = ap.parse_args()
    if len(args.orders) != len(args.n):
        ap.error("--orders must match -n in length")

    sysm = CharSystem(build_tower(args.p, args.s, degrees=(1, args.depth)
                      if args.depth > 1 else (1,)))
    chs = tuple(sysm.trivial(1) if o == 1 else sysm.char_of_order(1, o)
                for o in args.orders)
    dat = MonomialDatum(1, tuple(args.n), chs, args.a)
    sol = solve_monomial_transform(sysm, dat)
    print(f"case {sol.case}: exponents {sol.exponents}, b = {sol.b}, "
          f"twist = {sol.twist}")
    print(f"c = {sol.c}")
    rep = sweep_twisted_moments(sysm, dat, depth=args.depth)
    print(f"moment sweep to depth {rep['depth']}: {rep['checked']} tuples, "
          f"{rep['nonvanishing']} nonvanishing, "
          f"{len(rep['failures'])} failures")
    return 0 if rep["pass"] else 1


if __name__ == "__main__":
    raise SystemExit(main())
