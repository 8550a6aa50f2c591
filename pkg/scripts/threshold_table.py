#!/usr/bin/env python3
"""Print the threshold constants for a range of K."""

import argparse

from xorgame.constants import constants_bundle

p = argparse.ArgumentParser(description=__doc__)
p.add_argument("--K-max", type=int, default=9)
args = p.parse_args()

print(f"{'K':>3} {'c_star':>10} {'c_star/K':>10} {'tilde_c':>10} {'beta_K':>10}")
for K in range(3, args.K_max + 1):
    b = constants_bundle(K)
    print(f"{K:>3} {b.c_star:>10.6f} {b.c_star / K:>10.6f} {b.tilde_c:>10.6f} {b.beta:>10.6f}")
