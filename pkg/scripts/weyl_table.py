"""Lattice counts against the leading Weyl term for the library polytopes.

    python3 scripts/weyl_table.py --ks 10 20 50 100 200
"""

import argparse

from toricspec import library
from toricspec.quantum import weyl_report


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--ks", type=int, nargs="+", default=[10, 20, 50, 100, 200])
    ap.add_argument("--metaplectic", action="store_true")
    args = ap.parse_args()

    names = ["cp1", "square", "h2"] if args.metaplectic else list(library.LIBRARY)
    print(f"{'polytope':<9} {'k':>5} {'count':>8} {'leading':>10} {'gap':>8} {'|count/leading-1|':>18} {'3/k':>8}")
    for name in names:
        P = library.get(name)
        for k in args.ks:
            r = weyl_report(P, k, args.metaplectic)
            dev = abs(r.count / r.leading - 1)
            print(f"{name:<9} {k:>5} {r.count:>8} {r.leading:>10.1f} {r.relative_gap:>8.4f} {dev:>18.5f} {3 / k:>8.5f}")


if __name__ == "__main__":
    main()
