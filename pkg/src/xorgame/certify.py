"""Interval enclosures of the bound functions and grid certification.

The J_sqrt,3 regions are parameterised by lambda (c = Q(lambda)); the factor
1/c is enclosed as g(lambda)/phi(lambda) and exp2 ratios as
x^2 g(lambda x) / g(lambda), which stay well conditioned down to lambda = 0.
"""

from __future__ import annotations

import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .constants import beta_K, exp2_fn, q_inverse
from .interval import (
    Interval,
    IntervalDomainError,
    _expm1_iv,
    exp2_iv,
    exp_iv,
    g_iv,
    inv_q_iv,
    ln_iv,
    q_inverse_enclosure,
    sqrt_iv,
)

__all__ = [
    "CertificationReport",
    "GridSpec",
    "J_K_iv",
    "J_sqrt3_iv",
    "L_K_iv",
    "REGIONS",
    "certify_K_geq_7",
    "certify_LK_grid",
    "certify_beta_bounds",
    "certify_region",
    "certify_region_2a",
    "certify_region_2b",
    "certify_region_3",
    "certify_tail",
    "d2J_sqrt3_iv",
    "entropy_iv",
    "tail_delta_search",
]

_INV_E = math.exp(-1.0)


# enclosures -----------------------------------------------------------------


def _xlogx_point(x):
    """Enclosure of x ln x at points x in [0, 1] (0 at x = 0)."""
    x = np.asarray(x, dtype=np.float64)
    zero = x == 0.0
    safe = np.where(zero, 1.0, x)
    v = Interval(safe) * ln_iv(Interval(safe))
    return Interval._raw(np.where(zero, 0.0, v.lo), np.where(zero, 0.0, v.hi))


def _xlogx_iv(x):
    """x ln x over a box in [0, 1]; convex with minimum -1/e at 1/e."""
    a, b = _xlogx_point(x.lo), _xlogx_point(x.hi)
    inner = (x.lo <= _INV_E) & (_INV_E <= x.hi)
    lo = np.where(inner, -_INV_E - 1e-16, np.minimum(a.lo, b.lo))
    return Interval._raw(lo, np.maximum(a.hi, b.hi))


def _entropy_point(x):
    x = np.asarray(x, dtype=np.float64)
    xi = Interval(x)
    comp = 1.0 - xi
    comp = Interval._raw(np.maximum(comp.lo, 0.0), comp.hi)
    s = _xlogx_point(x) + _xlogx_iv(comp)
    return -s


def entropy_iv(a):
    """H over a box in [0, 1]; increasing up to 1/2, decreasing after."""
    if np.any(a.lo < 0) or np.any(a.hi > 1):
        raise IntervalDomainError("entropy needs alpha within [0, 1]")
    L, R = _entropy_point(a.lo), _entropy_point(a.hi)
    left = a.hi <= 0.5
    right = a.lo >= 0.5
    lo = np.where(left, L.lo, np.where(right, R.lo, np.minimum(L.lo, R.lo)))
    ln2_hi = math.log(2.0) + 1e-15
    hi = np.where(left, R.hi, np.where(right, L.hi, ln2_hi))
    return Interval._raw(np.maximum(lo, 0.0), hi)


def _weighted_log_iv(w, z):
    """w ln(w/z) = w ln w - w ln z; z must be positive, w may touch 0."""
    if np.any(z.lo <= 0):
        raise IntervalDomainError("zeta components must be strictly positive")
    return _xlogx_iv(w) - w * ln_iv(z)


def _lam_and_inv_c(c, lam):
    if lam is None:
        if c is None:
            raise ValueError("pass c or lam")
        c = c if isinstance(c, Interval) else Interval(c)
        lam = q_inverse_enclosure(c) if np.ndim(c.lo) == 0 else _vector_q_inverse(c)
        return lam, 1.0 / c
    lam = lam if isinstance(lam, Interval) else Interval(lam)
    if c is None:
        return lam, inv_q_iv(lam)
    c = c if isinstance(c, Interval) else Interval(c)
    return lam, 1.0 / c


def _vector_q_inverse(c):
    lo = [q_inverse_enclosure(Interval(a)).lo for a in np.ravel(c.lo)]
    hi = [q_inverse_enclosure(Interval(b)).hi for b in np.ravel(c.hi)]
    return Interval._raw(np.reshape(lo, np.shape(c.lo)), np.reshape(hi, np.shape(c.hi)))


def J_K_iv(alpha, zeta, c=None, K=3, lam=None):
    """Enclosure of J_K over boxes; give c, lam or both (c defaults to Q(lam))."""
    alpha = alpha if isinstance(alpha, Interval) else Interval(alpha)
    z1, z2 = (z if isinstance(z, Interval) else Interval(z) for z in zeta)
    lam, inv_c = _lam_and_inv_c(c, lam)
    comp = 1.0 - alpha
    comp = Interval._raw(np.maximum(comp.lo, 0.0), comp.hi)
    num = exp2_iv(lam * (z2 + z1)) + exp2_iv(lam * (z2 - z1))
    ratio = num / (2.0 * exp2_iv(lam))
    return (
        entropy_iv(alpha) * (1.0 / K)
        + _weighted_log_iv(alpha, z1)
        + _weighted_log_iv(comp, z2)
        + inv_c * ln_iv(ratio)
    )


def L_K_iv(alpha, c, K, lam=None):
    """Enclosure of c J_K(alpha, zeta_lin; c) = (c/K) H + ln(1/2 + exp2(lam(1-2a)) / (2 exp2(lam)))."""
    alpha = alpha if isinstance(alpha, Interval) else Interval(alpha)
    c = c if isinstance(c, Interval) else Interval(c)
    lam, _ = _lam_and_inv_c(c, lam)
    e = exp2_iv(lam * (1.0 - 2.0 * alpha)) / exp2_iv(lam)
    return c * (1.0 / K) * entropy_iv(alpha) + ln_iv(0.5 + 0.5 * e)


def _dL_K_iv(alpha, c, K, lam):
    """d/d alpha of L_K: (c/K) ln((1-a)/a) - 2 lam expm1(lam(1-2a)) / (exp2(lam) + exp2(lam(1-2a)))."""
    y = lam * (1.0 - 2.0 * alpha)
    return c * (1.0 / K) * ln_iv((1.0 - alpha) / alpha) - 2.0 * lam * _expm1_iv(y) / (exp2_iv(lam) + exp2_iv(y))


def _sqrt3_pieces(alpha, lam):
    s = sqrt_iv(alpha * 0.5)
    comp = 1.0 - alpha
    return s, comp + s, comp - s


def J_sqrt3_iv(alpha, lam):
    """Enclosure of J_3(alpha, zeta_sqrt(alpha); Q(lam)) for alpha in (0, 1/2], lam >= 0.

    ln(alpha/zeta_1) = ln(2 alpha)/2 and the (1-alpha) term vanishes, leaving
    H/3 + (alpha/2) ln(2 alpha) + (g/phi)(lam) ln[(x1^2 g(lam x1) + x2^2 g(lam x2)) / (2 g(lam))].
    """
    alpha = alpha if isinstance(alpha, Interval) else Interval(alpha)
    lam = lam if isinstance(lam, Interval) else Interval(lam)
    if np.any(alpha.lo <= 0) or np.any(alpha.hi > 0.5):
        raise IntervalDomainError("J_sqrt3_iv is set up for alpha in (0, 1/2]")
    _, x1, x2 = _sqrt3_pieces(alpha, lam)
    num = x1.sq() * g_iv(lam * x1) + x2.sq() * g_iv(lam * x2)
    log_term = inv_q_iv(lam) * ln_iv(num / (2.0 * g_iv(lam)))
    return entropy_iv(alpha) * (1.0 / 3.0) + (alpha * 0.5) * ln_iv(2.0 * alpha) + log_term


def d2J_sqrt3_iv(alpha, lam):
    """Enclosure of the second alpha-derivative of J_sqrt,3 (closed form)."""
    alpha = alpha if isinstance(alpha, Interval) else Interval(alpha)
    lam = lam if isinstance(lam, Interval) else Interval(lam)
    if np.any(alpha.lo <= 0) or np.any(alpha.hi >= 1) or np.any(lam.lo <= 0):
        raise IntervalDomainError("d2J_sqrt3_iv needs alpha in (0, 1) and lam > 0")
    s, x1, x2 = _sqrt3_pieces(alpha, lam)
    ds = 1.0 / (4.0 * s)
    d2s = -1.0 / (16.0 * s * s.sq())
    dx1 = ds - 1.0
    dx2 = -1.0 - ds
    y1, y2 = lam * x1, lam * x2
    A = exp2_iv(y1) + exp2_iv(y2)
    e1, e2 = _expm1_iv(y1), _expm1_iv(y2)
    dA = lam * (e1 * dx1 + e2 * dx2)
    d2A = lam.sq() * (exp_iv(y1) * dx1.sq() + exp_iv(y2) * dx2.sq()) + lam * (e1 - e2) * d2s
    d2T = -1.0 / (3.0 * alpha * (1.0 - alpha)) + 1.0 / (2.0 * alpha)
    r = dA / A
    return d2T + inv_q_iv(lam) * (d2A / A - r.sq())


# grids and reports ------------------------------------------------------------


def _exact_decimal(x):
    return Fraction(repr(x)) == Fraction(x)


@dataclass(frozen=True)
class GridSpec:
    ranges: tuple
    subdivisions: tuple

    def __post_init__(self):
        object.__setattr__(self, "ranges", tuple((float(a), float(b)) for a, b in self.ranges))
        object.__setattr__(self, "subdivisions", tuple(int(s) for s in self.subdivisions))
        if len(self.ranges) != len(self.subdivisions) or not self.ranges:
            raise ValueError("one subdivision count per range")
        for (a, b), s in zip(self.ranges, self.subdivisions):
            if not a < b or s < 1:
                raise ValueError(f"bad axis [{a}, {b}] with {s} subdivisions")

    @property
    def n_cells(self):
        return int(np.prod(self.subdivisions))

    def edges(self, axis):
        a, b = self.ranges[axis]
        e = np.linspace(a, b, self.subdivisions[axis] + 1)
        e[0], e[-1] = a, b
        # a decimal end like 0.07 is not a float; step such ends outward
        if not _exact_decimal(a):
            e[0] = np.nextafter(a, -np.inf)
        if not _exact_decimal(b):
            e[-1] = np.nextafter(b, np.inf)
        return e

    def cells(self):
        """One batched Interval per axis, cells in row-major (axis-0 major) order."""
        lows, highs = [], []
        for ax in range(len(self.ranges)):
            e = self.edges(ax)
            lows.append(e[:-1])
            highs.append(e[1:])
        lo_mesh = np.meshgrid(*lows, indexing="ij")
        hi_mesh = np.meshgrid(*highs, indexing="ij")
        return [Interval._raw(lo.ravel(), hi.ravel()) for lo, hi in zip(lo_mesh, hi_mesh)]

    def coords(self, flat_index):
        return [int(i) for i in np.unravel_index(flat_index, self.subdivisions)]

    def to_json_dict(self):
        return {"ranges": [list(r) for r in self.ranges], "subdivisions": list(self.subdivisions)}


@dataclass
class CertificationReport:
    region_id: str
    grid: GridSpec
    threshold: float
    worst_upper: float
    verdict: str
    failing_cells: list
    strict: bool = False
    details: dict = field(default_factory=dict)
    wall_time_ms: int = 0

    @property
    def passed(self):
        return self.verdict == "pass"

    def to_json_dict(self, timing=True):
        d = {
            "region": self.region_id,
            "grid": self.grid.to_json_dict(),
            "threshold": self.threshold,
            "worst_upper": self.worst_upper,
            "verdict": self.verdict,
            "failing_cells": self.failing_cells,
        }
        if self.details:
            d["details"] = self.details
        if timing:
            d["wall_time_ms"] = self.wall_time_ms
        return d


def _fails(upper, threshold, strict):
    return upper >= threshold if strict else upper > threshold


def _evaluate_cells(fn, cells, workers):
    """fn applied to all cells, optionally split into contiguous chunks across threads."""
    n = np.size(cells[0].lo)
    if workers <= 1 or n < 2 * workers:
        return np.asarray(fn(*cells).hi, dtype=np.float64).reshape(n)
    bounds = np.linspace(0, n, workers + 1).astype(int)
    chunks = [[c[lo:hi] for c in cells] for lo, hi in zip(bounds[:-1], bounds[1:])]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda ch: np.asarray(fn(*ch).hi, dtype=np.float64).reshape(-1), chunks))
    return np.concatenate(parts)


def _grid_report(region_id, grid, fn, threshold, strict=False, workers=1, details=None):
    t0 = time.perf_counter()
    upper = _evaluate_cells(fn, grid.cells(), workers)
    bad = np.flatnonzero(_fails(upper, threshold, strict))
    return CertificationReport(
        region_id=region_id,
        grid=grid,
        threshold=threshold,
        worst_upper=float(upper.max()),
        verdict="fail" if bad.size else "pass",
        failing_cells=[grid.coords(i) for i in bad],
        strict=strict,
        details=details or {},
        wall_time_ms=int(round(1000 * (time.perf_counter() - t0))),
    )


def certify_LK_grid(K, subdivisions=25, threshold=-1e-4, workers=1):
    """L_K(alpha, K) <= threshold on [0.15, 0.45].

    Each cell uses the mean-value form L(mid) + L'(cell)(cell - mid),
    intersected with the direct enclosure; the direct form alone loses the
    cancellation between the entropy and log terms.
    """
    c = Interval(float(K))
    lam = q_inverse_enclosure(c)

    def fn(a):
        direct = L_K_iv(a, c, K, lam=lam)
        m = Interval(a.mid)
        centred = L_K_iv(m, c, K, lam=lam) + _dL_K_iv(a, c, K, lam) * (a - m)
        return Interval._raw(np.maximum(direct.lo, centred.lo), np.minimum(direct.hi, centred.hi))

    grid = GridSpec(((0.15, 0.45),), (subdivisions,))
    return _grid_report(f"lk{K}", grid, fn, threshold, workers=workers)


def certify_region_2a(subdivisions=(200, 200), threshold=-1e-4, workers=1):
    grid = GridSpec(((0.07, 0.5), (0.0, 2.0)), subdivisions)
    return _grid_report("2a", grid, J_sqrt3_iv, threshold, workers=workers)


def certify_region_2b(subdivisions=(400, 400), threshold=-1e-4, workers=1):
    grid = GridSpec(((0.07, 0.4), (2.0, 2.15)), subdivisions)
    return _grid_report("2b", grid, J_sqrt3_iv, threshold, workers=workers)


def certify_region_3(subdivisions=(40, 40), threshold=-0.01, workers=1):
    grid = GridSpec(((0.39, 0.5), (1.9, 2.15)), subdivisions)
    return _grid_report("3", grid, d2J_sqrt3_iv, threshold, workers=workers)


def _beta_iv(K):
    K = float(K)
    Ki = Interval(K)
    num = 1.0 / Ki + 0.5 * ln_iv(Ki - 1.0) - 1.0 + Ki / (2.0 * (Ki - 1.0))
    return exp_iv(-(num / (0.5 - 1.0 / Ki)))


def _alpha_star_iv(k):
    lam = q_inverse_enclosure(Interval(float(k)))
    # exp2(lam)/lam^2 = g(lam)
    return 0.5 * (1.0 - ln_iv(g_iv(lam)) / lam)


def certify_K_geq_7(threshold=-0.016):
    t0 = time.perf_counter()
    a = _alpha_star_iv(7)
    b = _beta_iv(7)
    val = entropy_iv(a) + ln_iv((1.0 + exp_iv(-(2.0 * 0.99 * 7.0) * b)) * 0.5)
    upper = float(val.hi)
    ok = upper < threshold and 0 < a.lo and a.hi < 0.5 and 0 < b.lo and b.hi < 0.2
    return CertificationReport(
        region_id="kgeq7",
        grid=GridSpec(((7.0, 8.0),), (1,)),
        threshold=threshold,
        worst_upper=upper,
        verdict="pass" if ok else "fail",
        failing_cells=[] if ok else [[0]],
        strict=True,
        details={"alpha_star_7": [float(a.lo), float(a.hi)], "beta_7": [float(b.lo), float(b.hi)]},
        wall_time_ms=int(round(1000 * (time.perf_counter() - t0))),
    )


def certify_beta_bounds(threshold=0.2, K_max=14):
    """beta_K < 0.2 for K = 3..K_max, and e/(K-1) <= 0.2 at K = K_max + 1."""
    t0 = time.perf_counter()
    uppers, failing = {}, []
    for i, K in enumerate(range(3, K_max + 1)):
        uppers[K] = float(_beta_iv(K).hi)
        if not uppers[K] < threshold:
            failing.append([i])
    tail = float((Interval(math.e) / Interval(float(K_max))).hi)
    if tail > threshold:
        failing.append([K_max - 2])
    return CertificationReport(
        region_id="beta",
        grid=GridSpec(((3.0, K_max + 1.0),), (K_max - 1,)),
        threshold=threshold,
        worst_upper=max(max(uppers.values()), tail),
        verdict="fail" if failing else "pass",
        failing_cells=failing,
        strict=True,
        details={"beta_upper": {str(k): v for k, v in uppers.items()}, "e_over_K_minus_1": tail},
        wall_time_ms=int(round(1000 * (time.perf_counter() - t0))),
    )


# tail near alpha = 1 --------------------------------------------------------


def certify_tail(K, c, delta, eps, max_depth=20, initial_cells=8):
    """J_K(alpha, (1-delta, delta); c) <= -eps for alpha in [1-delta, 1], adaptively."""
    t0 = time.perf_counter()
    lam = q_inverse_enclosure(Interval(float(c)))
    ci = Interval(float(c))
    z1 = 1.0 - Interval(float(delta))
    z2 = Interval(float(delta))
    lo_edge = float(np.nextafter(1.0 - delta, -np.inf))
    edges = np.linspace(lo_edge, 1.0, initial_cells + 1)
    pending = [(float(a), float(b), 0) for a, b in zip(edges[:-1], edges[1:])]
    worst = -math.inf
    failing = []
    while pending:
        a = Interval(np.array([p[0] for p in pending]), np.array([p[1] for p in pending]))
        up = np.asarray(J_K_iv(a, (z1, z2), ci, K, lam=lam).hi).reshape(-1)
        nxt = []
        for (lo, hi, d), u in zip(pending, up):
            if u <= -eps:
                worst = max(worst, float(u))
            elif d >= max_depth:
                failing.append([lo, hi])
                worst = max(worst, float(u))
            else:
                mid = 0.5 * (lo + hi)
                nxt += [(lo, mid, d + 1), (mid, hi, d + 1)]
        pending = nxt
    return CertificationReport(
        region_id="tail",
        grid=GridSpec(((1.0 - delta, 1.0),), (initial_cells,)),
        threshold=-eps,
        worst_upper=worst,
        verdict="fail" if failing else "pass",
        failing_cells=failing,
        details={"K": K, "c": c, "delta": delta, "eps": eps, "max_depth": max_depth},
        wall_time_ms=int(round(1000 * (time.perf_counter() - t0))),
    )


def tail_eps_hat(K, c):
    """-J_K(1, (1, 0); c)/2 = -(1/2c) ln((exp2(lam) + exp2(-lam)) / (2 exp2(lam)))."""
    lam = q_inverse(c)
    return -math.log((exp2_fn(lam) + exp2_fn(-lam)) / (2.0 * exp2_fn(lam))) / (2.0 * c)


def tail_delta_search(K, c, max_steps=30):
    """First delta in beta_K/2, beta_K/4, ... certified by :func:`certify_tail`.

    Returns (delta_hat, eps_hat); delta_hat is None if the ladder runs out.
    """
    if not 2.0 < c < K:
        raise ValueError(f"need c in (2, {K}), got {c}")
    eps = tail_eps_hat(K, c)
    delta = beta_K(K)
    for _ in range(max_steps):
        delta /= 2.0
        if certify_tail(K, c, delta, eps).passed:
            return delta, eps
    warnings.warn(f"tail ladder exhausted for K={K}, c={c}", stacklevel=2)
    return None, eps


REGIONS = {
    "lk4": lambda **kw: certify_LK_grid(4, **kw),
    "lk5": lambda **kw: certify_LK_grid(5, **kw),
    "lk6": lambda **kw: certify_LK_grid(6, **kw),
    "2a": certify_region_2a,
    "2b": certify_region_2b,
    "3": certify_region_3,
    "kgeq7": lambda **kw: certify_K_geq_7(),
    "beta": lambda **kw: certify_beta_bounds(),
}


def certify_region(name, workers=1, **kw):
    if name not in REGIONS:
        raise KeyError(f"unknown region {name!r}; choose from {sorted(REGIONS)} or 'tail'")
    return REGIONS[name](workers=workers, **kw)
