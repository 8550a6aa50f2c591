"""Floating-point bound functions: entropy, J_K, H_k, L_K, zeta curves, J_sqrt3.

Every function that needs lambda = Q^{-1}(c) accepts it precomputed through
the ``lam`` keyword, so callers sweeping alpha at fixed c invert Q once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .constants import beta_K, exp2_fn, q_inverse, q_of
from .errors import DomainError

__all__ = [
    "H_k_three",
    "H_k_two",
    "J_K",
    "J_sqrt3",
    "L_K",
    "ZetaCurve",
    "d2J_sqrt3_dalpha2",
    "dJ_sqrt3_dalpha",
    "entropy",
    "ez_upper_bound",
    "near_zero_bound_check",
    "reflection_check",
    "zeta_lin",
    "zeta_sqrt",
    "zeta_star",
]


def entropy(alpha: float) -> float:
    """H(alpha) in nats, with 0 ln 0 = 0."""
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"entropy needs alpha in [0, 1], got {alpha}")
    if alpha == 0.0 or alpha == 1.0:
        return 0.0
    return -alpha * math.log(alpha) - (1.0 - alpha) * math.log1p(-alpha)


def _weighted_log(w, z):
    """w ln(w / z) with the 0 ln 0 convention; z may be 0 only when w is."""
    if w == 0.0:
        return 0.0
    if not z > 0.0:
        raise DomainError(f"zeta component must be positive where its weight {w} is nonzero, got {z}")
    return w * math.log(w / z)


def _log_ratio(lam, z1, z2):
    """ln[(exp2(lam(z2+z1)) + exp2(lam(z2-z1))) / (2 exp2(lam))]."""
    return math.log((exp2_fn(lam * (z2 + z1)) + exp2_fn(lam * (z2 - z1))) / (2.0 * exp2_fn(lam)))


def _check_alpha(alpha):
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")


def _lam_for(c, lam):
    if lam is not None:
        if not lam > 0:
            raise DomainError(f"lambda must be positive, got {lam}")
        return lam
    if not c > 2.0:
        raise DomainError(f"c must exceed 2, got {c}")
    return q_inverse(c)


def J_K(alpha: float, zeta, c: float, K: int, lam: Optional[float] = None) -> float:
    _check_alpha(alpha)
    if K < 3:
        raise DomainError(f"K must be >= 3, got {K}")
    z1, z2 = zeta
    lam = _lam_for(c, lam)
    ab = 1.0 - alpha
    return (
        entropy(alpha) / K
        + _weighted_log(alpha, z1)
        + _weighted_log(ab, z2)
        + _log_ratio(lam, z1, z2) / c
    )


def H_k_three(alpha, zeta, c, k, lam=None):
    """c H(alpha) + ck[alpha ln(alpha/z1) + (1-alpha) ln((1-alpha)/z2)] + log ratio at lambda = Q^{-1}(ck)."""
    _check_alpha(alpha)
    z1, z2 = zeta
    lam = _lam_for(c * k, lam)
    return (
        c * entropy(alpha)
        + c * k * (_weighted_log(alpha, z1) + _weighted_log(1.0 - alpha, z2))
        + _log_ratio(lam, z1, z2)
    )


def H_k_two(alpha, lam, k):
    """H_k along zeta_lin with c = Q(lam)/k."""
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    return H_k_three(alpha, zeta_lin(alpha), q_of(lam) / k, k, lam=lam)


def L_K(alpha, c, K, lam=None):
    return c * J_K(alpha, zeta_lin(alpha), c, K, lam=lam)


# zeta curves ----------------------------------------------------------------


def zeta_lin(alpha):
    return (alpha, 1.0 - alpha)


def zeta_sqrt(alpha, K):
    return (math.sqrt(alpha / (K - 1)), 1.0 - alpha)


def zeta_star(alpha, K):
    """sqrt curve below 0.99 beta_K; above it sqrt for K = 3 and lin for K >= 4."""
    if K == 3 or alpha <= 0.99 * beta_K(K):
        return zeta_sqrt(alpha, K)
    return zeta_lin(alpha)


@dataclass(frozen=True)
class ZetaCurve:
    kind: str
    K: int
    c: Optional[float] = None
    delta_hat: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("lin", "sqrt", "hat"):
            raise ValueError(f"unknown curve kind {self.kind!r}")
        if self.kind == "hat":
            if self.c is None or not 2.0 < self.c < self.K:
                raise DomainError(f"the hat curve needs c in (2, K), got {self.c}")
            if self.delta_hat is None:
                from .certify import tail_delta_search

                object.__setattr__(self, "delta_hat", tail_delta_search(self.K, self.c)[0])
            if not 0.0 < self.delta_hat < 0.5:
                raise DomainError(f"delta_hat must lie in (0, 1/2), got {self.delta_hat}")

    @classmethod
    def lin(cls, K=3):
        return cls("lin", K)

    @classmethod
    def sqrt(cls, K):
        return cls("sqrt", K)

    @classmethod
    def hat(cls, K, c, delta_hat=None):
        return cls("hat", K, c, delta_hat)

    def __call__(self, alpha):
        _check_alpha(alpha)
        if self.kind == "lin":
            return zeta_lin(alpha)
        if self.kind == "sqrt":
            return zeta_sqrt(alpha, self.K)
        if alpha <= 0.5:
            return zeta_star(alpha, self.K)
        if alpha <= 1.0 - self.delta_hat:
            z1, z2 = zeta_star(1.0 - alpha, self.K)
            return (z2, z1)
        return (1.0 - self.delta_hat, self.delta_hat)


# J_sqrt,3 and its alpha-derivatives ------------------------------------------


def _sqrt3_parts(alpha, lam):
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    s = math.sqrt(alpha / 2.0)
    ab = 1.0 - alpha
    return s, ab + s, ab - s


def J_sqrt3(alpha, lam):
    """J_3(alpha, zeta_sqrt(alpha); Q(lam))."""
    _sqrt3_parts(alpha, lam)
    return J_K(alpha, zeta_sqrt(alpha, 3), q_of(lam), 3, lam=lam)


def dJ_sqrt3_dalpha(alpha, lam):
    s, x1, x2 = _sqrt3_parts(alpha, lam)
    ds = 1.0 / (4.0 * s)
    dx1, dx2 = ds - 1.0, -1.0 - ds
    A = exp2_fn(lam * x1) + exp2_fn(lam * x2)
    dA = lam * (math.expm1(lam * x1) * dx1 + math.expm1(lam * x2) * dx2)
    dT = math.log((1.0 - alpha) / alpha) / 3.0 + 0.5 * math.log(2.0 * alpha) + 0.5
    return dT + dA / (A * q_of(lam))


def d2J_sqrt3_dalpha2(alpha, lam):
    s, x1, x2 = _sqrt3_parts(alpha, lam)
    ds = 1.0 / (4.0 * s)
    d2s = -1.0 / (16.0 * s**3)
    dx1, dx2 = ds - 1.0, -1.0 - ds
    A = exp2_fn(lam * x1) + exp2_fn(lam * x2)
    e1, e2 = math.expm1(lam * x1), math.expm1(lam * x2)
    dA = lam * (e1 * dx1 + e2 * dx2)
    d2A = lam * lam * ((e1 + 1.0) * dx1**2 + (e2 + 1.0) * dx2**2) + lam * (e1 - e2) * d2s
    d2T = -1.0 / (3.0 * alpha * (1.0 - alpha)) + 1.0 / (2.0 * alpha)
    return d2T + (d2A / A - (dA / A) ** 2) / q_of(lam)


# inequality checks ----------------------------------------------------------


def _tol(x):
    return 1e-12 * max(1.0, abs(x))


def near_zero_bound_check(alpha, c, K):
    """J_K(alpha, zeta_sqrt; c) <= (1/2 - 1/K) alpha ln(alpha / beta_K) on (0, beta_K)."""
    beta = beta_K(K)
    if not 0.0 < alpha < beta or not 2.0 < c < K:
        raise DomainError(f"need alpha in (0, {beta}) and c in (2, {K}); got alpha={alpha}, c={c}")
    lhs = J_K(alpha, zeta_sqrt(alpha, K), c, K)
    rhs = (0.5 - 1.0 / K) * alpha * math.log(alpha / beta)
    return lhs <= rhs + _tol(rhs)


def reflection_check(alpha, c, K):
    """J_K at the reflected zeta* never exceeds J_K at 1 - alpha, for alpha in [1/2, 1)."""
    if not 0.5 <= alpha < 1.0 or not 2.0 < c < K:
        raise DomainError(f"need alpha in [1/2, 1) and c in (2, {K}); got alpha={alpha}, c={c}")
    lam = q_inverse(c)
    z1, z2 = zeta_star(1.0 - alpha, K)
    lhs = J_K(alpha, (z2, z1), c, K, lam=lam)
    rhs = J_K(1.0 - alpha, (z1, z2), c, K, lam=lam)
    return lhs <= rhs + _tol(rhs)


def ez_upper_bound(m, n_vec, ell, curve: ZetaCurve):
    """ln of the E[Z^(ell)] bound without its unspecified O(1) factor."""
    if not 1 <= ell <= m:
        raise DomainError(f"need 1 <= ell <= m, got ell={ell}, m={m}")
    K = len(n_vec)
    alpha = ell / m
    z1, z2 = curve(alpha)
    total = 0.0
    for nj in n_vec:
        total += J_K(alpha, (z1, z2), m / nj, K)
    return 0.5 * (K - 1) * math.log(ell) - 0.5 * K * math.log(z2) + m * total
