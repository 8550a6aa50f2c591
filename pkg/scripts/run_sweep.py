#!/usr/bin/env python3
"""Satisfiability sweep across the K=3 threshold; writes a CSV and prints the crossing."""

import argparse
import sys

from xorgame.harness import crossing_point, run_sweep, wilson_interval


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--K", type=int, default=3)
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--c", default="2.4,2.55,2.7,2.8,2.95,3.1")
    p.add_argument("--trials", type=int, default=400)
    p.add_argument("--seed", type=int, default=20240611)
    p.add_argument("--parallel", type=int, default=1)
    p.add_argument("--out", default="sweep.csv")
    args = p.parse_args(argv)

    c_list = [float(v) for v in args.c.split(",")]
    summary = run_sweep(args.K, args.n, c_list, args.trials, args.seed, args.parallel)
    with open(args.out, "w", newline="") as fh:
        fh.write(summary.to_csv())
    for r in summary.rows:
        lo, hi = wilson_interval(r.sat_count, r.trials)
        print(f"c={r.c:<6} m={r.m:<6} p_hat={r.p_hat:.4f}  99% [{lo:.3f}, {hi:.3f}]")
    cross = crossing_point(summary)
    print(f"crossing ~ {cross}  c_star = {summary.c_star:.5f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
