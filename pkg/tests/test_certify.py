import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from xorgame import bounds as B
from xorgame.certify import (
    GridSpec,
    J_K_iv,
    J_sqrt3_iv,
    L_K_iv,
    certify_beta_bounds,
    certify_K_geq_7,
    certify_LK_grid,
    certify_region,
    certify_region_2a,
    certify_region_2b,
    certify_region_3,
    certify_tail,
    d2J_sqrt3_iv,
    entropy_iv,
    tail_delta_search,
)
from xorgame.constants import beta_K, q_inverse, q_of
from xorgame.interval import Interval, IntervalDomainError


def test_sqrt3_closed_form_at_half():
    lam = 2.0
    c = 2.0 * math.expm1(2.0) / (math.exp(2.0) - 3.0)
    expected = math.log(2.0) / 3.0 - math.log(2.0) / c
    r = J_sqrt3_iv(Interval(0.5), Interval(lam))
    assert expected in r
    assert r.width < 1e-13
    assert B.J_sqrt3(0.5, lam) == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize("K", [4, 5, 6])
@pytest.mark.parametrize("alpha", [0.15, 0.3, 0.45])
def test_LK_iv_contains_point_value(K, alpha):
    r = L_K_iv(Interval(alpha), Interval(float(K)), K)
    assert B.L_K(alpha, K, K) in r


def test_entropy_iv_peak():
    r = entropy_iv(Interval(0.4, 0.6))
    assert math.log(2.0) in r
    assert r.lo <= B.entropy(0.4) <= r.hi


def test_entropy_iv_domain():
    with pytest.raises(IntervalDomainError):
        entropy_iv(Interval(-0.1, 0.2))


def test_sqrt3_domain():
    with pytest.raises(IntervalDomainError):
        J_sqrt3_iv(Interval(0.4, 0.6), Interval(1.0))


@given(
    st.floats(0.08, 0.49),
    st.floats(0.01, 2.1),
    st.floats(1e-6, 0.01),
    st.floats(1e-6, 0.01),
)
def test_sqrt3_nested_boxes(a, lam, wa, wl):
    inner = J_sqrt3_iv(Interval(a, a + wa / 2), Interval(lam, lam + wl / 2))
    outer = J_sqrt3_iv(Interval(a - wa / 2, a + wa), Interval(lam - wl / 2, lam + wl))
    assert outer.lo <= inner.lo + 1e-12 and inner.hi <= outer.hi + 1e-12
    assert B.J_sqrt3(a, lam) in outer


@given(st.floats(0.01, 0.99), st.floats(0.05, 0.95), st.floats(2.05, 2.95))
def test_JK_iv_contains_point(alpha, z, c):
    lam = q_inverse(c)
    val = B.J_K(alpha, (z, 1 - z), c, 3, lam=lam)
    r = J_K_iv(Interval(alpha), (Interval(z), Interval(1 - z)), Interval(c), 3)
    assert r.lo - 1e-12 <= val <= r.hi + 1e-12


def test_grid_edges_step_out_decimals():
    g = GridSpec(((0.07, 0.5),), (4,))
    e = g.edges(0)
    assert e[0] < 0.07 and e[-1] == 0.5
    assert g.cells()[0].lo.size == 4
    assert g.coords(3) == [3]


def test_grid_rejects_bad_axes():
    with pytest.raises(ValueError):
        GridSpec(((1.0, 0.0),), (3,))
    with pytest.raises(ValueError):
        GridSpec(((0.0, 1.0),), (0,))


# region verdicts ------------------------------------------------------------


@pytest.mark.parametrize("K,bound", [(4, -0.0024), (5, -0.0035), (6, -0.0041)])
def test_LK_certifies(K, bound):
    rep = certify_LK_grid(K)
    assert rep.passed and rep.worst_upper < bound


def test_region_3_certifies():
    rep = certify_region_3()
    assert rep.passed and rep.worst_upper < -0.05


def test_region_2a_certifies():
    rep = certify_region_2a()
    assert rep.passed and rep.worst_upper <= -1e-4


def test_K_geq_7_strict():
    rep = certify_K_geq_7()
    assert rep.passed and rep.strict
    assert rep.worst_upper < -0.016
    lo, hi = rep.details["alpha_star_7"]
    assert lo <= 0.5 * (1 - math.log(math.exp(q_inverse(7)) - 1 - q_inverse(7)) / q_inverse(7) + 2 * math.log(q_inverse(7)) / q_inverse(7)) <= hi


def test_beta_bounds():
    rep = certify_beta_bounds()
    assert rep.passed
    for K, up in rep.details["beta_upper"].items():
        assert beta_K(int(K)) <= up < 0.2


def test_impossible_threshold_fails():
    rep = certify_LK_grid(4, threshold=-1.0)
    assert not rep.passed and len(rep.failing_cells) == 25


def test_coarse_2b_grid_fails():
    # 10x10 cells are too wide for the dependency loss near the margin
    rep = certify_region_2b(subdivisions=(10, 10))
    assert rep.verdict == "fail" and rep.failing_cells


def test_unknown_region():
    with pytest.raises(KeyError):
        certify_region("nope")


# soundness: sampled point values sit under the certified bound -----------------

N_SAMPLES = 10_000


def _rng():
    return np.random.default_rng(20240611)


@pytest.mark.parametrize("K", [4, 5, 6])
def test_LK_samples_below_threshold(K):
    alphas = _rng().uniform(0.15, 0.45, N_SAMPLES)
    lam = q_inverse(K)
    worst = max(B.L_K(float(a), K, K, lam=lam) for a in alphas)
    assert worst <= -1e-4
    assert worst <= certify_LK_grid(K).worst_upper


@pytest.mark.parametrize(
    "region,arange,lrange,fn,thr",
    [
        ("2a", (0.07, 0.5), (1e-6, 2.0), B.J_sqrt3, -1e-4),
        ("2b", (0.07, 0.4), (2.0, 2.15), B.J_sqrt3, -1e-4),
        ("3", (0.39, 0.5), (1.9, 2.15), B.d2J_sqrt3_dalpha2, -0.01),
    ],
)
def test_region_samples_below_threshold(region, arange, lrange, fn, thr):
    rng = _rng()
    a = rng.uniform(*arange, N_SAMPLES)
    lam = rng.uniform(*lrange, N_SAMPLES)
    vals = np.array([fn(float(x), float(y)) for x, y in zip(a, lam)])
    assert vals.max() <= thr
    # and each sampled value lies in the enclosure of a small box around it
    enc = J_sqrt3_iv if region != "3" else d2J_sqrt3_iv
    box = enc(Interval(np.maximum(a - 1e-4, arange[0]), np.minimum(a + 1e-4, arange[1])), Interval(lam, lam + 1e-4))
    assert np.all(vals <= box.hi)


# determinism ------------------------------------------------------------------


def _dump(rep):
    return json.dumps(rep.to_json_dict(timing=False), sort_keys=True)


def test_certification_independent_of_workers():
    a = certify_region_2b(subdivisions=(60, 60), workers=1)
    b = certify_region_2b(subdivisions=(60, 60), workers=4)
    assert _dump(a) == _dump(b)
    assert _dump(certify_LK_grid(5, workers=1)) == _dump(certify_LK_grid(5, workers=3))


def test_report_json_timing_flag():
    rep = certify_region_3(subdivisions=(4, 4))
    assert "wall_time_ms" in rep.to_json_dict()
    assert "wall_time_ms" not in rep.to_json_dict(timing=False)


# tail near alpha = 1 ------------------------------------------------------------


@pytest.mark.parametrize("K,c", [(3, 2.1), (3, 2.5), (3, 2.9), (4, 3.5), (5, 4.5)])
def test_tail_search(K, c):
    delta, eps = tail_delta_search(K, c)
    assert eps > 0
    assert delta is not None and 0 < delta < beta_K(K)
    rep = certify_tail(K, c, delta, eps)
    assert rep.passed and rep.worst_upper <= -eps
    end = J_K_iv(Interval(1 - 1e-6, 1.0), (Interval(1 - delta), Interval(delta)), Interval(c), K)
    assert end.hi <= -eps


def test_tail_eps_matches_endpoint_value():
    c = 2.5
    eps = tail_delta_search(3, c)[1]
    assert eps == pytest.approx(-B.J_K(1.0, (1.0, 1e-300), c, 3) / 2, rel=1e-12)


def test_tail_fails_for_unreachable_eps():
    rep = certify_tail(3, 2.5, 0.02, 10.0, max_depth=3)
    assert not rep.passed


def test_tail_search_domain():
    with pytest.raises(ValueError):
        tail_delta_search(3, 3.5)


def test_hat_curve_uses_search():
    curve = B.ZetaCurve.hat(3, 2.5)
    assert curve.delta_hat == tail_delta_search(3, 2.5)[0]
    z1, z2 = curve(1.0)
    assert (z1, z2) == (1 - curve.delta_hat, curve.delta_hat)
    assert q_of(q_inverse(2.5)) == pytest.approx(2.5)
