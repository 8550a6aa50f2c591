import json
import math

import mpmath as mp
import pytest
from hypothesis import given
from hypothesis import strategies as st

from xorgame.constants import (
    alpha_k,
    alpha_star,
    beta_K,
    big_F,
    c_star,
    constants_bundle,
    exp2_fn,
    h_K,
    mu_of_c,
    q_inverse,
    q_of,
    tilde_c,
    tilde_mu,
)
from xorgame.errors import DomainError

TABLE_C = [2.75381, 3.90708, 4.96219, 5.98428, 6.99345, 7.99728, 8.99888]
TABLE_RATIO = [0.917935, 0.97677, 0.992438, 0.99738, 0.999064, 0.99966, 0.999876]

# 50-digit mpmath values (findroot on the defining equations), frozen
MP = {
    # K: (lambda, c_star, tilde_mu, tilde_c, beta, alpha_star)
    3: (2.1491257999070625, 2.753805829974258, 1.2564312086261697, 2.4554074822841279, 0.075816332464079178, 0.46242867976345776),
    4: (3.5935119694474261, 3.9070806595121845, 1.9038136944403835, 3.0891193592100337, 0.15506804723178773, 0.37474637579942004),
    5: (4.8010075497225178, 4.9621919563105031, 2.3366629822630539, 3.5089013324228448, 0.17778909894843002, 0.33185941944886734),
    7: (6.9534557133534746, 6.9934463112757618, 2.9183004757830526, 4.0724262389972115, 0.17520534547335708, 0.27943693430420594),
    9: (8.9899125192694797, 8.9988830825414853, 3.3148773617860549, 4.4572953785878381, 0.1597281482641153, 0.24435456709011258),
}


@pytest.mark.parametrize("K,expected", list(zip(range(3, 10), TABLE_C)))
def test_table_thresholds(K, expected):
    assert abs(c_star(K) - expected) < 1e-4


@pytest.mark.parametrize("K,expected", list(zip(range(3, 10), TABLE_RATIO)))
def test_table_ratio(K, expected):
    assert abs(c_star(K) / K - expected) < 1e-4


@pytest.mark.parametrize("K", sorted(MP))
def test_against_high_precision(K):
    lam, cs, tm, tc, beta, ast = MP[K]
    assert q_inverse(K) == pytest.approx(lam, rel=1e-12)
    assert c_star(K) == pytest.approx(cs, rel=1e-12)
    assert tilde_mu(K) == pytest.approx(tm, rel=1e-12)
    assert tilde_c(K) == pytest.approx(tc, rel=1e-12)
    assert beta_K(K) == pytest.approx(beta, rel=1e-12)
    assert alpha_star(K) == pytest.approx(ast, rel=1e-10)


def test_q_values():
    assert q_of(0.0) == 2.0
    assert q_of(1.0) == pytest.approx(2.3922111911773328144, rel=1e-14)
    assert q_of(1e-3) == pytest.approx(2.0003333888925922839, rel=1e-14)
    assert q_of(30.0) == pytest.approx(30.000000000084218607, rel=1e-14)
    with pytest.raises(DomainError):
        q_of(-0.1)


def test_q_series_branch_joins_direct():
    z = 1e-4
    series = 2 + z / 3 + z * z / 18 + z**3 / 270
    assert q_of(z * (1 - 1e-12)) == pytest.approx(series, rel=1e-14)
    assert q_of(z) == pytest.approx(series, rel=1e-13)


@given(st.floats(min_value=-5, max_value=5, allow_nan=False))
def test_exp2_matches_mpmath(z):
    # cancellation costs about 2|log10 z| digits; give the oracle that many more
    extra = 0 if z == 0 else int(2 * abs(math.log10(abs(z))))
    with mp.workdps(40 + extra):
        exact = mp.e ** mp.mpf(z) - 1 - mp.mpf(z)
    got = exp2_fn(z)
    if exact == 0:
        assert got == 0
    else:
        assert abs(got - float(exact)) <= 4e-16 * abs(float(exact))


@given(st.floats(min_value=0.0, max_value=40.0), st.floats(min_value=1e-6, max_value=40.0))
def test_q_increasing(a, d):
    assert q_of(a + d) >= q_of(a)


@given(st.floats(min_value=2.0001, max_value=60.0))
def test_q_inverse_roundtrip(c):
    assert q_of(q_inverse(c)) == pytest.approx(c, rel=1e-12)


def test_q_inverse_domain():
    for bad in (2.0, 1.0, -3.0):
        with pytest.raises(DomainError):
            q_inverse(bad)


@pytest.mark.parametrize("K", range(3, 10))
def test_q_at_mu_of_c_star_is_K(K):
    assert q_of(mu_of_c(c_star(K), K)) == pytest.approx(K, abs=1e-8)


@pytest.mark.parametrize("K", [3, 4, 6, 9])
def test_tilde_mu_minimises_h(K):
    m = tilde_mu(K)
    assert big_F(m) == pytest.approx(K, rel=1e-12)
    for d in (1e-3, 1e-2, 0.1):
        assert h_K(m + d, K) > h_K(m, K)
        assert h_K(m - d, K) > h_K(m, K)


@given(st.integers(3, 12), st.floats(min_value=0.01, max_value=3.0))
def test_mu_of_c_is_larger_root(K, excess):
    c = tilde_c(K) + excess
    mu = mu_of_c(c, K)
    assert mu >= tilde_mu(K)
    assert h_K(mu, K) == pytest.approx(c, rel=1e-12)


def test_mu_of_c_against_mpmath():
    assert mu_of_c(2.6, 3) == pytest.approx(1.8391120356207535, rel=1e-12)
    assert mu_of_c(4.5, 5) == pytest.approx(4.248256171375658, rel=1e-12)


def test_mu_of_c_below_core_density():
    with pytest.raises(DomainError):
        mu_of_c(2.4, 3)


def test_beta_quoted_values():
    assert beta_K(3) == pytest.approx(0.0758, abs=1e-4)
    assert beta_K(4) == pytest.approx(0.155, abs=1e-3)
    assert beta_K(7) == pytest.approx(0.1752, abs=1e-4)
    assert all(beta_K(K) < 0.2 for K in range(3, 60))


def test_alpha_values():
    assert alpha_star(4) == pytest.approx(0.3747, abs=1e-4)
    assert alpha_star(7) == pytest.approx(0.2794, abs=1e-4)
    assert alpha_k(4) == pytest.approx(math.e / 16, rel=1e-14)
    assert all(0 < alpha_star(k) < 0.5 for k in range(3, 30))


@pytest.mark.parametrize("bad", [2, 1, 3.5])
def test_integer_K_required(bad):
    with pytest.raises(DomainError):
        c_star(bad)


def test_bundle_json_keys():
    d = constants_bundle(3).to_json_dict()
    assert list(d) == ["K", "lambda", "c_star", "tilde_mu", "tilde_c", "beta", "alpha_k", "alpha_star"]
    json.dumps(d)
    assert d["c_star"] == c_star(3)


@given(st.integers(3, 20))
def test_threshold_ordering(K):
    # K - c_star decays like e^{-K}; past K ~ 30 the gap is below one ulp
    assert 2.0 < tilde_c(K) < c_star(K) < K
