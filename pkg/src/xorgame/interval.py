"""Outward-rounded interval arithmetic on binary64.

An :class:`Interval` holds ``lo`` and ``hi`` as numpy float64 values. They may be
scalars or equally shaped arrays; an array-valued interval is a batch of
independent intervals, which is how the grid certifier evaluates thousands of
cells at once.

Rounding model: every arithmetic result is stepped outward by one ulp, results
of ``exp``/``log``/``expm1`` by four ulps. This assumes the underlying library
routines are faithfully rounded to within a couple of ulps, which holds for glibc
and for numpy's float64 kernels.
"""

from __future__ import annotations

import math

import numpy as np

from .constants import q_inverse

__all__ = [
    "Interval",
    "IntervalDomainError",
    "add",
    "sub",
    "mul",
    "div",
    "exp_iv",
    "ln_iv",
    "sqrt_iv",
    "pow_int_iv",
    "exp2_iv",
    "g_iv",
    "phi_iv",
    "q_iv",
    "q_inverse_enclosure",
]

_TRANSCENDENTAL_ULPS = 4
_SERIES_CUTOFF = 0.5
_SERIES_TERMS = 24


class IntervalDomainError(ValueError):
    """An interval operation was applied outside its domain."""


def _down(x, k=1):
    x = np.asarray(x, dtype=np.float64)
    return x - k * np.abs(np.spacing(x))


def _up(x, k=1):
    x = np.asarray(x, dtype=np.float64)
    return x + k * np.abs(np.spacing(x))


def _unwrap(a):
    """Return a 0-d result as a numpy scalar so scalar intervals stay cheap."""
    if isinstance(a, np.ndarray) and a.ndim == 0:
        return a[()]
    return a


class Interval:
    """Closed interval ``[lo, hi]`` (or a batch of them)."""

    __slots__ = ("lo", "hi")
    __array_priority__ = 1000  # keep numpy from broadcasting into our operators

    def __init__(self, lo, hi=None):
        lo = np.asarray(lo, dtype=np.float64)
        hi = lo if hi is None else np.asarray(hi, dtype=np.float64)
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
            raise IntervalDomainError("NaN endpoint")
        if np.any(lo > hi):
            raise IntervalDomainError(f"empty interval [{lo}, {hi}]")
        self.lo = _unwrap(lo)
        self.hi = _unwrap(hi)

    @classmethod
    def _raw(cls, lo, hi):
        obj = cls.__new__(cls)
        obj.lo = _unwrap(np.asarray(lo, dtype=np.float64))
        obj.hi = _unwrap(np.asarray(hi, dtype=np.float64))
        return obj

    @classmethod
    def point(cls, x):
        return cls(x, x)

    @classmethod
    def hull(cls, a, b):
        return cls._raw(np.minimum(a.lo, b.lo), np.maximum(a.hi, b.hi))

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def mid(self):
        return 0.5 * (self.lo + self.hi)

    def __contains__(self, x):
        return bool(np.all((self.lo <= x) & (x <= self.hi)))

    def contains(self, x):
        """Elementwise membership test (works for batches)."""
        return (self.lo <= x) & (x <= self.hi)

    def subset_of(self, other):
        return bool(np.all((other.lo <= self.lo) & (self.hi <= other.hi)))

    def __getitem__(self, idx):
        return Interval._raw(np.asarray(self.lo)[idx], np.asarray(self.hi)[idx])

    # arithmetic -----------------------------------------------------------

    def __neg__(self):
        return Interval._raw(-self.hi, -self.lo)

    def __add__(self, other):
        other = _coerce(other)
        return Interval._raw(_down(self.lo + other.lo), _up(self.hi + other.hi))

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return Interval._raw(_down(self.lo - other.hi), _up(self.hi - other.lo))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        p1 = self.lo * other.lo
        p2 = self.lo * other.hi
        p3 = self.hi * other.lo
        p4 = self.hi * other.hi
        lo = np.minimum(np.minimum(p1, p2), np.minimum(p3, p4))
        hi = np.maximum(np.maximum(p1, p2), np.maximum(p3, p4))
        return Interval._raw(_down(lo), _up(hi))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if np.any((other.lo <= 0) & (other.hi >= 0)):
            raise IntervalDomainError("division by an interval containing 0")
        q1 = self.lo / other.lo
        q2 = self.lo / other.hi
        q3 = self.hi / other.lo
        q4 = self.hi / other.hi
        lo = np.minimum(np.minimum(q1, q2), np.minimum(q3, q4))
        hi = np.maximum(np.maximum(q1, q2), np.maximum(q3, q4))
        return Interval._raw(_down(lo), _up(hi))

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def sq(self):
        """Square, tight when the interval straddles zero."""
        a = self.lo * self.lo
        b = self.hi * self.hi
        straddle = (self.lo <= 0) & (self.hi >= 0)
        lo = np.where(straddle, 0.0, np.minimum(a, b))
        hi = np.maximum(a, b)
        return Interval._raw(np.maximum(_down(lo), 0.0), _up(hi))

    def __pow__(self, n):
        return pow_int_iv(self, n)

    def exp(self):
        return exp_iv(self)

    def log(self):
        return ln_iv(self)

    def sqrt(self):
        return sqrt_iv(self)


def _coerce(x):
    if isinstance(x, Interval):
        return x
    return Interval(x, x)


def _tolerance_check_nonneg(x, what):
    if np.any(x < 0):
        raise IntervalDomainError(f"{what} requires a non-negative argument")


# module-level primitives ---------------------------------------------------


def add(a, b):
    return _coerce(a) + _coerce(b)


def sub(a, b):
    return _coerce(a) - _coerce(b)


def mul(a, b):
    return _coerce(a) * _coerce(b)


def div(a, b):
    return _coerce(a) / _coerce(b)


def exp_iv(x):
    x = _coerce(x)
    lo = np.maximum(_down(np.exp(x.lo), _TRANSCENDENTAL_ULPS), 0.0)
    hi = _up(np.exp(x.hi), _TRANSCENDENTAL_ULPS)
    return Interval._raw(lo, hi)


def _expm1_iv(x):
    x = _coerce(x)
    return Interval._raw(
        np.maximum(_down(np.expm1(x.lo), _TRANSCENDENTAL_ULPS), -1.0),
        _up(np.expm1(x.hi), _TRANSCENDENTAL_ULPS),
    )


def ln_iv(x):
    x = _coerce(x)
    if np.any(x.lo <= 0):
        raise IntervalDomainError("ln requires a strictly positive interval")
    return Interval._raw(
        _down(np.log(x.lo), _TRANSCENDENTAL_ULPS), _up(np.log(x.hi), _TRANSCENDENTAL_ULPS)
    )


def sqrt_iv(x):
    x = _coerce(x)
    _tolerance_check_nonneg(x.lo, "sqrt")
    return Interval._raw(np.maximum(_down(np.sqrt(x.lo)), 0.0), _up(np.sqrt(x.hi)))


def pow_int_iv(x, n):
    x = _coerce(x)
    n = int(n)
    if n < 0:
        return 1.0 / pow_int_iv(x, -n)
    if n == 0:
        return Interval(np.ones_like(x.lo), np.ones_like(x.hi))
    if n % 2 == 0:
        base = x.sq()
        out = base
        for _ in range(n // 2 - 1):
            out = out * base
        return out
    out = x
    for _ in range(n - 1):
        out = out * x
    return out


# Entire functions with positive Taylor coefficients, used to keep the small-|z|
# regime free of cancellation:
#   exp2(z) = e^z - 1 - z        = sum_{n>=2} z^n / n!
#   g(z)    = exp2(z) / z^2      = sum_{n>=0} z^n / (n+2)!
#   phi(z)  = (e^z - 1) / z      = sum_{n>=0} z^n / (n+1)!
# g and phi are increasing on the whole real line (integral representations
# over [0,1] with positive weights), exp2 is convex with minimum 0 at z = 0.


def _series_point(z, offset):
    """Enclose sum_{n>=0} z^n/(n+offset)! at points |z| < cutoff, with tail bound."""
    z = np.asarray(z, dtype=np.float64)
    zi = Interval(z, z)
    total = Interval(np.zeros_like(z), np.zeros_like(z))
    power = Interval(np.ones_like(z), np.ones_like(z))
    for n in range(_SERIES_TERMS):
        f = float(math.factorial(n + offset))
        coef = Interval(1.0) / Interval(_down(f), _up(f))
        total = total + power * coef
        power = power * zi
    # Lagrange-type tail: |sum_{n>=N} z^n/(n+o)!| <= |z|^N e^{|z|} / (N+o)!
    tail = _up(np.abs(z) ** _SERIES_TERMS * math.exp(_SERIES_CUTOFF) / math.factorial(_SERIES_TERMS + offset), 2)
    return Interval._raw(_down(total.lo - tail), _up(total.hi + tail))


def _exp2_point(z):
    z = np.asarray(z, dtype=np.float64)
    small = np.abs(z) < _SERIES_CUTOFF
    zs = np.where(small, z, 0.0)
    zb = np.where(small, 1.0, z)
    ser = _series_point(zs, 2) * Interval(zs, zs).sq()
    e = exp_iv(Interval(zb, zb))
    direct = (e - 1.0) - Interval(zb, zb)
    lo = np.where(small, ser.lo, direct.lo)
    hi = np.where(small, ser.hi, direct.hi)
    return Interval._raw(np.maximum(lo, 0.0), hi)


def _g_point(z):
    z = np.asarray(z, dtype=np.float64)
    small = np.abs(z) < _SERIES_CUTOFF
    zs = np.where(small, z, 0.0)
    zb = np.where(small, 1.0, z)
    ser = _series_point(zs, 2)
    zbi = Interval(zb, zb)
    direct = _exp2_point(zb) / zbi.sq()
    return Interval._raw(np.where(small, ser.lo, direct.lo), np.where(small, ser.hi, direct.hi))


def _phi_point(z):
    z = np.asarray(z, dtype=np.float64)
    small = np.abs(z) < _SERIES_CUTOFF
    zs = np.where(small, z, 0.0)
    zb = np.where(small, 1.0, z)
    ser = _series_point(zs, 1)
    direct = _expm1_iv(Interval(zb, zb)) / Interval(zb, zb)
    return Interval._raw(np.where(small, ser.lo, direct.lo), np.where(small, ser.hi, direct.hi))


def exp2_iv(x):
    """Enclosure of e^z - 1 - z, cancellation-free near 0."""
    x = _coerce(x)
    at_lo = _exp2_point(x.lo)
    at_hi = _exp2_point(x.hi)
    pos = x.lo >= 0
    neg = x.hi <= 0
    lo = np.where(pos, at_lo.lo, np.where(neg, at_hi.lo, 0.0))
    hi = np.where(pos, at_hi.hi, np.where(neg, at_lo.hi, np.maximum(at_lo.hi, at_hi.hi)))
    return Interval._raw(lo, hi)


def g_iv(x):
    """Enclosure of (e^z - 1 - z)/z^2 (value 1/2 at 0); increasing."""
    x = _coerce(x)
    return Interval._raw(_g_point(x.lo).lo, _g_point(x.hi).hi)


def phi_iv(x):
    """Enclosure of (e^z - 1)/z (value 1 at 0); increasing."""
    x = _coerce(x)
    return Interval._raw(_phi_point(x.lo).lo, _phi_point(x.hi).hi)


def q_iv(x):
    """Enclosure of Q(z) = z(e^z-1)/(e^z-1-z) for z >= 0 (Q(0) = 2); increasing."""
    x = _coerce(x)
    _tolerance_check_nonneg(x.lo, "Q")
    # Q = phi/g at each endpoint; Q increasing, so endpoint enclosures suffice.
    at_lo = _phi_point(x.lo) / _g_point(x.lo)
    at_hi = _phi_point(x.hi) / _g_point(x.hi)
    return Interval._raw(at_lo.lo, at_hi.hi)


def inv_q_iv(x):
    """Enclosure of 1/Q(z) = g(z)/phi(z) for z >= 0; decreasing."""
    x = _coerce(x)
    _tolerance_check_nonneg(x.lo, "1/Q")
    at_lo = _g_point(x.lo) / _phi_point(x.lo)
    at_hi = _g_point(x.hi) / _phi_point(x.hi)
    return Interval._raw(at_hi.lo, at_lo.hi)


def q_inverse_enclosure(c, tol=1e-14):
    """Interval [lam_lo, lam_hi] certified to contain Q^{-1}(c) for c > 2.

    The float root seeds a narrow bracket whose ends are then proved to satisfy
    Q(lam_lo) < c < Q(lam_hi) with interval evaluations; if that fails the
    bracket is found by interval bisection instead.
    """
    c = _coerce(c)
    if c.lo <= 2.0:
        raise IntervalDomainError("Q^{-1} is defined only for c > 2")
    seed = q_inverse(float(c.mid))
    for rel in (1e-14, 1e-13, 4e-13, 2e-12, 1e-11, 1e-9):
        lo, hi = seed * (1 - rel) - 1e-300, seed * (1 + rel)
        if q_iv(lo).hi < c.lo and q_iv(hi).lo > c.hi:
            return Interval(lo, hi)
    return _q_inverse_bisect(c, tol)


def _q_inverse_bisect(c, tol):
    lo, hi = 0.0, 1.0
    while q_iv(hi).lo <= c.hi:
        hi *= 2.0
        if hi > 1e3:
            raise IntervalDomainError("Q^{-1} bracket overflow")
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        qm = q_iv(mid)
        if qm.hi < c.lo:
            lo = mid
        elif qm.lo > c.hi:
            hi = mid
        else:
            # Q(mid) not separated from c: shrink from both sides separately.
            lo = _shrink_left(lo, mid, c)
            hi = _shrink_right(mid, hi, c)
            break
    return Interval(lo, hi)


def _shrink_left(lo, hi, c):
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if q_iv(mid).hi < c.lo:
            lo = mid
        else:
            hi = mid
    return lo


def _shrink_right(lo, hi, c):
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if q_iv(mid).lo > c.hi:
            hi = mid
        else:
            lo = mid
    return hi
