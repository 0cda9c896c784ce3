#!/usr/bin/env python3
"""Print the corank-1 minor-counting table alongside the determinant-count
alternative, showing the superfactorial growth of the classical approach.

Usage:
    python scripts/minor_growth.py [--max-dim 4] [--max-codim 5]
"""

import argparse

from catafind import bg_condition_count, minor_count


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-dim", type=int, default=4)
    ap.add_argument("--max-codim", type=int, default=5)
    args = ap.parse_args()

    header = "n\\r".rjust(4) + "".join(f"{r:>16d}" for r in range(1, args.max_codim + 1))
    print("minors (corank-1 chain):")
    print(header)
    for n in range(1, args.max_dim + 1):
        cells = []
        for r in range(1, args.max_codim + 1):
            total = minor_count(n, (1,) * r).table_total
            cells.append(f"{total:>16.3e}" if total > 10 ** 12 else f"{total:>16d}")
        print(f"{n:>4d}" + "".join(cells))

    print("\nlevel-determinant conditions (n + r):")
    print(header)
    for n in range(1, args.max_dim + 1):
        print(f"{n:>4d}" + "".join(
            f"{bg_condition_count(n, r):>16d}" for r in range(1, args.max_codim + 1)))


if __name__ == "__main__":
    main()
