"""Monte Carlo sweeps, core-size statistics and the enumeration check suite."""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .constants import c_star, mu_of_c, q_of, tilde_c
from .gf2 import count_solutions_log2
from .instances import BlockShape, exact_EY, exact_EZ, make_rng, mix_seed, sample_game, second_moment_terms
from .peeling import core_is_satisfiable, core_rows_parallel, predicted_core, uniformity_census

__all__ = [
    "CORE_HEADER",
    "SWEEP_HEADER",
    "CoreRow",
    "SweepRow",
    "SweepSummary",
    "TrialRecord",
    "crossing_point",
    "round_half_even",
    "run_core_stats",
    "run_enumeration_checks",
    "run_sweep",
    "stirling_bound_scan",
    "wilson_interval",
]

SWEEP_HEADER = ["K", "n", "c", "m", "trials", "sat_count", "p_hat", "std_err", "c_star"]


def CORE_HEADER(K):
    return ["K", "n", "c", "trial", "core_m"] + [f"core_n{j + 1}" for j in range(K)] + ["pred_m", "pred_nj", "pred_ratio"]


def round_half_even(x: float) -> int:
    return int(round(x))  # Python's round is banker's rounding


def _fmt(x):
    if isinstance(x, float):
        return "nan" if math.isnan(x) else repr(x)
    return str(x)


@dataclass(frozen=True)
class TrialRecord:
    trial_index: int
    seed: int
    K: int
    n: int
    m: int
    c: float
    core_m: int
    core_n: tuple
    satisfiable: bool
    wall_time_ms: int = 0


def _run_trial(args):
    K, n, c, m, trial_index, seed, cross_check = args
    t0 = time.perf_counter()
    shape = BlockShape.uniform(K, n)
    g = sample_game(m, shape, make_rng(seed), seed=seed)
    sat, core_m, alive = core_is_satisfiable(g.edges, g.s, shape.total)
    if cross_check:
        direct = count_solutions_log2(g.gamma, g.s) is not None
        if direct != sat:
            raise RuntimeError(f"core and direct solve disagree on trial {trial_index} (seed {seed})")
    cols = np.unique(g.edges[alive])
    core_n = tuple(int(v) for v in np.bincount(shape.block_of(cols), minlength=K)) if cols.size else (0,) * K
    ms = int(round(1000 * (time.perf_counter() - t0)))
    return TrialRecord(trial_index, seed, K, n, m, c, core_m, core_n, sat, ms)


def _map_trials(tasks, parallelism):
    if parallelism <= 1:
        out = [_run_trial(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            out = list(pool.map(_run_trial, tasks, chunksize=max(1, len(tasks) // (4 * parallelism))))
    return sorted(out, key=lambda r: r.trial_index)


@dataclass(frozen=True)
class SweepRow:
    c: float
    m: int
    trials: int
    sat_count: int

    @property
    def p_hat(self):
        return self.sat_count / self.trials

    @property
    def std_err(self):
        p = self.p_hat
        return math.sqrt(p * (1.0 - p) / self.trials)

    @property
    def in_theorem_scope(self):
        return self.c > 2.0


@dataclass
class SweepSummary:
    K: int
    n: int
    rows: list
    c_star: float
    records: list = field(default_factory=list, repr=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SWEEP_HEADER)
        for r in self.rows:
            w.writerow([self.K, self.n, _fmt(r.c), r.m, r.trials, r.sat_count, _fmt(r.p_hat), _fmt(r.std_err), _fmt(self.c_star)])
        return buf.getvalue()

    def out_of_scope(self):
        """c values at or below 2, where the threshold theorem says nothing."""
        return [r.c for r in self.rows if not r.in_theorem_scope]


def run_sweep(K, n, c_list, trials, master_seed, parallelism=1, cross_check=False) -> SweepSummary:
    """Satisfiability frequency at each density; trial i of c_list[j] uses sub-seed mix(master, j*trials + i)."""
    if n < 1 or trials < 1:
        raise ValueError("need n >= 1 and trials >= 1")
    c_list = [float(c) for c in c_list]
    if any(not c > 0 for c in c_list):
        raise ValueError("densities must be positive")
    tasks = []
    for j, c in enumerate(c_list):
        m = max(1, round_half_even(c * n))
        for t in range(trials):
            idx = j * trials + t
            tasks.append((K, n, c, m, idx, mix_seed(master_seed, idx), cross_check))
    records = _map_trials(tasks, parallelism)
    rows = []
    for j, c in enumerate(c_list):
        block = records[j * trials : (j + 1) * trials]
        rows.append(SweepRow(c, block[0].m, trials, sum(r.satisfiable for r in block)))
    return SweepSummary(K, n, rows, c_star(K), records)


def wilson_interval(successes, trials, z=2.5758293035489004):
    """Wilson score interval; the default z gives 99% coverage."""
    if trials < 1:
        raise ValueError("trials must be positive")
    p = successes / trials
    denom = 1.0 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


def crossing_point(summary: SweepSummary, level=0.5):
    """Linear interpolation of the first c where p_hat drops below ``level``; None if it never does."""
    prev = None
    for r in summary.rows:
        if r.p_hat < level:
            if prev is None:
                return r.c
            if prev.p_hat == r.p_hat:
                return r.c
            t = (prev.p_hat - level) / (prev.p_hat - r.p_hat)
            return prev.c + t * (r.c - prev.c)
        prev = r
    return None


# core statistics -------------------------------------------------------------


@dataclass(frozen=True)
class CoreRow:
    K: int
    n: int
    c: float
    trial: int
    core_m: int
    core_n: tuple
    pred_m: float
    pred_nj: float
    pred_ratio: float

    @property
    def predicted_empty(self):
        return self.pred_m == 0.0

    def as_list(self):
        return [self.K, self.n, _fmt(self.c), self.trial, self.core_m, *self.core_n, _fmt(self.pred_m), _fmt(self.pred_nj), _fmt(self.pred_ratio)]


def run_core_stats(K, n, c, trials, master_seed):
    """Per-trial 2-core sizes next to the asymptotic prediction (0, 0, nan when the core should be empty)."""
    if not c > 0:
        raise ValueError("c must be positive")
    m = max(1, round_half_even(c * n))
    shape = BlockShape.uniform(K, n)
    if c > tilde_c(K):
        pred = predicted_core(K, n, c)
    else:
        pred = (0.0, 0.0, math.nan)
    rows = []
    for t in range(trials):
        g = sample_game(m, shape, make_rng(mix_seed(master_seed, t)))
        alive, deg = core_rows_parallel(g.edges, shape.total)
        cols = np.flatnonzero(deg >= 2) if alive.any() else np.zeros(0, dtype=np.int64)
        core_n = tuple(int(v) for v in np.bincount(shape.block_of(cols), minlength=K)) if cols.size else (0,) * K
        rows.append(CoreRow(K, n, float(c), t, int(alive.sum()), core_n, *pred))
    return rows


def core_rows_to_csv(rows, K):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CORE_HEADER(K))
    for r in rows:
        w.writerow(r.as_list())
    return buf.getvalue()


def predicted_ratio(K, c):
    return q_of(mu_of_c(c, K))


# exact enumeration suite -----------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _census_uniform(m, shape):
    census = uniformity_census(m, shape)
    total = sum(sum(v.values()) for v in census.values())
    equal = all(len(set(v.values())) == 1 for v in census.values())
    return equal, total, census


def run_enumeration_checks():
    """Exact identities over fully enumerated small spaces."""
    out = []
    shape = BlockShape(3, (2, 2, 2))
    for m in (4,):
        EN, EN2, EX = second_moment_terms(m, shape)
        out.append(CheckResult(f"second-moment m={m}", EN2 / EN**2 == EX + 1, f"E[N^2]/E[N]^2={EN2 / EN**2}, E[X]+1={EX + 1}"))
    for ell in range(1, 5):
        lhs = exact_EZ(4, shape, ell)
        rhs = Fraction(math.comb(4, ell)) ** (1 - shape.K) * math.prod(exact_EY(4, nj, ell) for nj in shape.n)
        out.append(CheckResult(f"product identity m=4 l={ell}", lhs == rhs, f"{lhs} vs {rhs}"))
    for m, sh in ((3, shape), (4, shape), (4, BlockShape(2, (2, 2)))):
        ok, total, census = _census_uniform(m, sh)
        expected = math.prod(sh.n) ** m
        out.append(CheckResult(f"uniformity census K={sh.K} n={sh.n} m={m}", ok and total == expected, f"{len(census)} size classes over {total} graphs"))
    return out


# Stirling-type constant --------------------------------------------------------


@dataclass(frozen=True)
class StirlingReport:
    m_max: int
    sup_ratio: float
    argmax: tuple
    bound: float = 3.0

    @property
    def passed(self):
        return self.sup_ratio <= self.bound


def stirling_bound_scan(m_max=1000):
    """sup over 1 <= l <= m <= m_max of C(m,l)^{-1} / (sqrt(l) e^{-m H(l/m)})."""
    if not 1 <= m_max <= 2000:
        raise ValueError("m_max must lie in [1, 2000]")
    best, arg = -math.inf, (0, 0)
    lg = np.array([math.lgamma(k + 1) for k in range(m_max + 1)])
    for m in range(1, m_max + 1):
        ell = np.arange(1, m + 1)
        a = ell / m
        with np.errstate(divide="ignore", invalid="ignore"):
            H = -a * np.log(a) - np.where(a < 1, (1 - a) * np.log1p(-a), 0.0)
        log_ratio = -(lg[m] - lg[ell] - lg[m - ell]) - 0.5 * np.log(ell) + m * H
        i = int(np.argmax(log_ratio))
        if log_ratio[i] > best:
            best, arg = float(log_ratio[i]), (m, int(ell[i]))
    return StirlingReport(m_max, math.exp(best), arg)
