"""Threshold constants and the scalar special functions behind them.

All root finding is plain bisection on monotone brackets, run until the bracket
cannot shrink any further in binary64.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache

from .errors import DomainError

__all__ = [
    "ConstantsBundle",
    "alpha_k",
    "alpha_star",
    "beta_K",
    "big_F",
    "c_star",
    "constants_bundle",
    "exp2_fn",
    "h_K",
    "mu_of_c",
    "q_inverse",
    "q_of",
    "tilde_c",
    "tilde_mu",
]

_Q_SERIES_CUTOFF = 1e-4
_EXP2_SERIES_CUTOFF = 0.5
_EXP2_SERIES_TERMS = 20


def _bisect(f, lo, hi, target):
    """Root of increasing ``f`` on ``[lo, hi]``, bisected to adjacent floats."""
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
    # pick whichever endpoint is closer in value
    return lo if abs(f(lo) - target) <= abs(f(hi) - target) else hi


def exp2_fn(z: float) -> float:
    """``e^z - 1 - z`` without cancellation near 0."""
    z = float(z)
    if abs(z) < _EXP2_SERIES_CUTOFF:
        # sum_{n>=2} z^n/n!, Horner; the truncation error is below 0.5^21/21!
        acc = 0.0
        for n in range(_EXP2_SERIES_TERMS + 1, 2, -1):
            acc = (acc + 1.0) * z / n
        return (acc + 1.0) * z * z / 2.0
    return math.expm1(z) - z


def q_of(z: float) -> float:
    """Q(z) = z(e^z - 1)/(e^z - 1 - z), extended by Q(0) = 2."""
    z = float(z)
    if z < 0:
        raise DomainError(f"Q is evaluated on z >= 0, got {z}")
    if z < _Q_SERIES_CUTOFF:
        return 2.0 + z / 3.0 + z * z / 18.0 + z**3 / 270.0
    if z < 1.0:
        return z * math.expm1(z) / exp2_fn(z)
    # rewritten with e^{-z} so large z does not overflow
    em = math.exp(-z)
    return z * (1.0 - em) / (1.0 - em - z * em)


@lru_cache(maxsize=4096)
def q_inverse(c: float) -> float:
    """Q^{-1}(c) for c > 2."""
    c = float(c)
    if not c > 2.0:
        raise DomainError(f"Q maps (0, inf) onto (2, inf); got c = {c}")
    hi = 60.0
    while q_of(hi) < c:
        hi *= 2.0
    return _bisect(q_of, 0.0, hi, c)


def h_K(mu: float, K: int) -> float:
    """h_K(mu) = mu / (e^{-mu}(e^mu - 1))^{K-1}."""
    mu = float(mu)
    if not mu > 0:
        raise DomainError(f"h_K needs mu > 0, got {mu}")
    if K < 2:
        raise DomainError("h_K needs K >= 2")
    return mu / (-math.expm1(-mu)) ** (K - 1)


def _check_K(K, least=3):
    if int(K) != K or K < least:
        raise DomainError(f"K must be an integer >= {least}, got {K}")


def c_star(K: int) -> float:
    """Satisfiability threshold h_K(Q^{-1}(K))."""
    _check_K(K)
    return h_K(q_inverse(K), K)


def big_F(z: float) -> float:
    """F(z) = 1 + (e^z - 1)/z; increasing, F(0+) = 2."""
    z = float(z)
    if not z > 0:
        raise DomainError(f"F needs z > 0, got {z}")
    return 1.0 + math.expm1(z) / z


def _F_ext(z):
    return 2.0 if z == 0.0 else big_F(z)


@lru_cache(maxsize=256)
def tilde_mu(K: int) -> float:
    """F^{-1}(K): the minimiser of h_K."""
    _check_K(K)
    hi = 1.0
    while big_F(hi) < K:
        hi *= 2.0
    return _bisect(_F_ext, 0.0, hi, float(K))


def tilde_c(K: int) -> float:
    """Minimum of h_K; below this density the 2-core is empty a.a.s."""
    return h_K(tilde_mu(K), K)


def mu_of_c(c: float, K: int) -> float:
    """Larger root of h_K(mu) = c, for c > tilde_c(K)."""
    _check_K(K)
    c = float(c)
    lo = tilde_mu(K)
    if not c > h_K(lo, K):
        raise DomainError(f"mu_K(c) needs c > tilde_c({K}) = {h_K(lo, K)}, got {c}")
    hi = 2.0 * lo
    while h_K(hi, K) < c:
        hi *= 2.0
    return _bisect(lambda mu: h_K(mu, K), lo, hi, c)


def beta_K(K: int) -> float:
    """Upper end of the near-zero regime for the sqrt curve."""
    _check_K(K)
    num = 1.0 / K + math.log(math.sqrt(K - 1)) - 1.0 + K / (2.0 * (K - 1))
    return math.exp(-num / (0.5 - 1.0 / K))


def alpha_k(k: int) -> float:
    _check_K(k)
    return math.e * k ** (-k / (k - 2))


def alpha_star(k: int) -> float:
    """1/2 (1 - ln(exp2(lam)/lam^2)/lam) with lam = Q^{-1}(k)."""
    _check_K(k)
    lam = q_inverse(k)
    return 0.5 * (1.0 - math.log(exp2_fn(lam) / lam**2) / lam)


@dataclass(frozen=True)
class ConstantsBundle:
    K: int
    lambda_K: float
    c_star: float
    tilde_mu: float
    tilde_c: float
    beta: float
    alpha_k: float
    alpha_star: float

    def to_json_dict(self):
        d = asdict(self)
        d["lambda"] = d.pop("lambda_K")
        keys = ["K", "lambda", "c_star", "tilde_mu", "tilde_c", "beta", "alpha_k", "alpha_star"]
        return {k: d[k] for k in keys}


def constants_bundle(K: int) -> ConstantsBundle:
    _check_K(K)
    return ConstantsBundle(
        K=int(K),
        lambda_K=q_inverse(K),
        c_star=c_star(K),
        tilde_mu=tilde_mu(K),
        tilde_c=tilde_c(K),
        beta=beta_K(K),
        alpha_k=alpha_k(K),
        alpha_star=alpha_star(K),
    )
