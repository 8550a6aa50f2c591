#!/usr/bin/env python3
"""Empirical 2-core sizes against the asymptotic prediction, above and below the core density."""

import argparse
import sys

import numpy as np

from xorgame.constants import tilde_c
from xorgame.harness import core_rows_to_csv, run_core_stats


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--K", type=int, default=3)
    p.add_argument("--n", type=int, default=30000)
    p.add_argument("--c", type=float, nargs="+", default=[1.5, 2.6])
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out")
    args = p.parse_args(argv)

    chunks = []
    for i, c in enumerate(args.c):
        rows = run_core_stats(args.K, args.n, c, args.trials, args.seed + i)
        chunks.append(core_rows_to_csv(rows, args.K) if i == 0 else core_rows_to_csv(rows, args.K).split("\n", 1)[1])
        empty = sum(r.core_m == 0 for r in rows)
        if c > tilde_c(args.K):
            ratio = np.mean([r.core_m / np.mean(r.core_n) for r in rows])
            print(f"c={c}: mean core ratio {ratio:.5f}, predicted {rows[0].pred_ratio:.5f}, empty {empty}/{len(rows)}")
        else:
            print(f"c={c} <= tilde_c={tilde_c(args.K):.5f}: empty cores {empty}/{len(rows)}")
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write("".join(chunks))
    return 0


if __name__ == "__main__":
    sys.exit(main())
