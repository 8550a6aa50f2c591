"""Command line entry point: ``xorgame <subcommand> ...`` (or ``python3 -m xorgame``)."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import bounds as B
from .certify import REGIONS, certify_region, certify_tail, tail_delta_search
from .constants import constants_bundle, q_inverse
from .errors import BudgetExceeded, DomainError
from .gf2 import format_system, parse_system, solve
from .harness import core_rows_to_csv, crossing_point, run_core_stats, run_enumeration_checks, run_sweep, stirling_bound_scan
from .instances import BlockShape, make_rng, sample_game
from .peeling import peel_matrix

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _emit(text, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read(path):
    with open(path) as fh:
        return fh.read()


def cmd_constants(args):
    bundle = constants_bundle(args.K)
    d = bundle.to_json_dict()
    if args.json:
        print(json.dumps(d, indent=2))
    else:
        for k, v in d.items():
            print(f"{k:>10}  {v}")
    return EXIT_OK


def cmd_solve(args):
    M, s = parse_system(_read(args.input))
    x = solve(M, s)
    print("UNSAT" if x is None else "SAT " + "".join(map(str, x.tolist())))
    return EXIT_OK


def cmd_sample(args):
    shape = BlockShape.uniform(args.K, args.n)
    g = sample_game(args.m, shape, make_rng(args.seed), seed=args.seed)
    _emit(format_system(g.gamma, g.s), args.out)
    return EXIT_OK


def cmd_peel(args):
    M, _ = parse_system(_read(args.input))
    rows, cols = peel_matrix(M)
    print(f"core {len(rows)} x {len(cols)}")
    print("rows " + " ".join(map(str, rows)))
    print("cols " + " ".join(map(str, cols)))
    return EXIT_OK


def cmd_core_stats(args):
    rows = run_core_stats(args.K, args.n, args.c, args.trials, args.seed)
    _emit(core_rows_to_csv(rows, args.K), args.out)
    if rows[0].predicted_empty:
        print(f"c = {args.c} is below the core appearance density; prediction is the empty core", file=sys.stderr)
    return EXIT_OK


def cmd_bounds(args):
    if args.curve == "hat":
        curve = B.ZetaCurve.hat(args.K, args.c)
    elif args.curve == "sqrt":
        curve = B.ZetaCurve.sqrt(args.K)
    else:
        curve = B.ZetaCurve.lin(args.K)
    lam = q_inverse(args.c)
    print("alpha,J,L")
    for a in np.linspace(0.0, 1.0, args.alpha_grid):
        a = float(a)
        J = B.J_K(a, curve(a), args.c, args.K, lam=lam)
        L = B.L_K(a, args.c, args.K, lam=lam)
        print(f"{a!r},{J!r},{L!r}")
    return EXIT_OK


def cmd_certify(args):
    if args.region == "tail":
        if args.K is None or args.c is None:
            raise DomainError("--region tail needs --K and --c")
        delta, eps = tail_delta_search(args.K, args.c)
        if delta is None:
            print(f"tail: no delta on the ladder certified for K={args.K}, c={args.c}")
            return EXIT_FAIL
        report = certify_tail(args.K, args.c, delta, eps)
    else:
        report = certify_region(args.region, workers=args.workers)
    print(f"{report.region_id}: {report.verdict} worst_upper={report.worst_upper!r} threshold={report.threshold!r} failing={len(report.failing_cells)}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(report.to_json_dict(timing=not args.no_timing), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_sweep(args):
    c_list = [float(v) for v in args.c.split(",") if v.strip()]
    summary = run_sweep(args.K, args.n, c_list, args.trials, args.seed, args.parallel, args.cross_check)
    _emit(summary.to_csv(), args.out)
    skipped = summary.out_of_scope()
    if skipped:
        print(f"note: c <= 2 lies outside the threshold theorem: {skipped}", file=sys.stderr)
    cross = crossing_point(summary)
    if cross is not None:
        print(f"p_hat crosses 1/2 near c = {cross:.4f} (c_star = {summary.c_star:.5f})", file=sys.stderr)
    return EXIT_OK


def cmd_checks(args):
    ok = True
    for r in run_enumeration_checks():
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}  ({r.detail})")
        ok &= r.passed
    st = stirling_bound_scan(args.m_max)
    print(f"{'PASS' if st.passed else 'FAIL'}  stirling constant m<={st.m_max}  (sup {st.sup_ratio:.6f} at m,l={st.argmax})")
    ok &= st.passed
    return EXIT_OK if ok else EXIT_FAIL


def build_parser():
    p = argparse.ArgumentParser(prog="xorgame", description="Random K-XORGAME satisfiability tools.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("constants", help="threshold constants for one K")
    s.add_argument("--K", type=int, required=True)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_constants)

    s = sub.add_parser("solve", help="solve a system in the text format")
    s.add_argument("--input", required=True)
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("sample", help="draw a uniform K-XORGAME instance")
    s.add_argument("--K", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("peel", help="2-core of a system in the text format")
    s.add_argument("--input", required=True)
    s.set_defaults(func=cmd_peel)

    s = sub.add_parser("core-stats", help="empirical vs predicted 2-core sizes (CSV)")
    s.add_argument("--K", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--c", type=float, required=True)
    s.add_argument("--trials", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_core_stats)

    s = sub.add_parser("bounds", help="J_K and L_K along a zeta curve (CSV)")
    s.add_argument("--K", type=int, required=True)
    s.add_argument("--c", type=float, required=True)
    s.add_argument("--curve", choices=["lin", "sqrt", "hat"], required=True)
    s.add_argument("--alpha-grid", type=int, default=101)
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("certify", help="interval certification of one region")
    s.add_argument("--region", choices=sorted(REGIONS) + ["tail"], required=True)
    s.add_argument("--json")
    s.add_argument("--no-timing", action="store_true", help="omit wall_time_ms so the JSON is reproducible")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--K", type=int)
    s.add_argument("--c", type=float)
    s.set_defaults(func=cmd_certify)

    s = sub.add_parser("sweep", help="Monte Carlo satisfiability sweep (CSV)")
    s.add_argument("--K", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--c", required=True, help="comma separated densities")
    s.add_argument("--trials", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--parallel", type=int, default=1)
    s.add_argument("--out")
    s.add_argument("--cross-check", action="store_true", help="also solve the full system and compare")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("checks", help="exact enumeration identities")
    s.add_argument("--m-max", type=int, default=1000)
    s.set_defaults(func=cmd_checks)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, BudgetExceeded, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
