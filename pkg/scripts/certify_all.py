#!/usr/bin/env python3
"""Run every certification region and write one JSON report per region."""

import argparse
import json
import os
import sys
import time

from xorgame.certify import REGIONS, certify_region


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--outdir", default="certificates")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-timing", action="store_true")
    args = p.parse_args(argv)

    os.makedirs(args.outdir, exist_ok=True)
    ok = True
    t0 = time.perf_counter()
    for name in REGIONS:
        rep = certify_region(name, workers=args.workers)
        ok &= rep.passed
        print(f"{name:>6}: {rep.verdict}  worst_upper={rep.worst_upper:.6g}  threshold={rep.threshold}")
        with open(os.path.join(args.outdir, f"{name}.json"), "w") as fh:
            json.dump(rep.to_json_dict(timing=not args.no_timing), fh, indent=2, sort_keys=True)
            fh.write("\n")
    print(f"total {time.perf_counter() - t0:.1f}s")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
