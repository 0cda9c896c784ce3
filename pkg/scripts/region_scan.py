#!/usr/bin/env python3
"""Scan the (beta, delta) parameter plane of the reaction-diffusion field
and write a CSV of steady-state and attractor counts per grid cell.

Usage:
    python scripts/region_scan.py out.csv [--cells 21] [--span 1.5]
                                  [--alpha 0.2] [--gamma 0.2]
                                  [--k1 1.0] [--k2 1.0]
"""

import argparse

from catafind.cli import main as cli_main


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out", help="output CSV path")
    ap.add_argument("--cells", type=int, default=21)
    ap.add_argument("--span", type=float, default=1.5)
    ap.add_argument("--alpha", type=float, default=0.2)
    ap.add_argument("--gamma", type=float, default=0.2)
    ap.add_argument("--k1", type=float, default=1.0)
    ap.add_argument("--k2", type=float, default=1.0)
    args = ap.parse_args()

    rc = cli_main([
        "scan", "--builtin", "rd",
        "--axes", "b,d",
        f"--range=-{args.span}:{args.span},-{args.span}:{args.span}",
        "--cells", f"{args.cells},{args.cells}",
        "--fix", f"a={args.alpha},g={args.gamma},k1={args.k1},k2={args.k2}",
        "--out", args.out,
    ])
    if rc == 0:
        print(f"wrote {args.cells}x{args.cells} grid to {args.out}")
    return rc


if __name__ == "__main__":
    raise SystemExit(main())
