import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from evtsir.fading import (
    FadingParams,
    Scenario,
    beta_prime_sir_cdf,
    beta_prime_sir_quantile,
    derive_params,
    gamma_approx,
    gamma_match,
    interferer_sum_match,
    sample_power,
    sample_sir,
)
from evtsir.presets import PRESETS, TABLE1_COLUMNS
from evtsir.sirdist import exact_cdf
from evtsir.stats import ks_distance
from evtsir.streams import RandomStream

from oracles import RAYLEIGH, rayleigh

params = st.builds(
    FadingParams,
    kappa=st.floats(0, 20),
    mu=st.floats(0.05, 20),
    m=st.floats(0.05, 20),
    mean_power=st.floats(1e-3, 1e3),
)


def test_params_validation():
    for bad in [(-1, 1, 1), (1, 0, 1), (1, 1, 0), (1, 1, 1, 0), (1, math.nan, 1)]:
        with pytest.raises(ValueError):
            FadingParams(*bad)
    with pytest.raises(ValueError):
        Scenario(RAYLEIGH, ())


def test_derive_rayleigh_collapse():
    d = derive_params(rayleigh(1))
    assert d.theta == 1.0 and d.lam == 1.0


def test_derive_shadowed_source():
    d = derive_params(Scenario(FadingParams(2, 2, 3), (RAYLEIGH,)))
    assert d.theta == pytest.approx(1 / 6, rel=1e-15)
    assert d.lam == pytest.approx(7 / 18, rel=1e-15)


def test_derive_interferer():
    d = derive_params(Scenario(RAYLEIGH, (FadingParams(2, 1, 2, 3.0),)))
    assert d.theta_i[0] == pytest.approx(1.0, rel=1e-15)
    assert d.lambda_i[0] == pytest.approx(2.0, rel=1e-15)


@given(params)
def test_theta_not_above_lambda(p):
    assert p.theta <= p.lam * (1 + 1e-15)
    d = derive_params(Scenario(p, (p, p)))
    assert all(t <= l * (1 + 1e-15) for t, l in zip(d.theta_i, d.lambda_i))


def test_gamma_match_examples():
    assert gamma_match(FadingParams(0, 2.7, 1.3))[0] == pytest.approx(2.7, rel=1e-15)
    assert gamma_match(FadingParams(2, 2, 3))[0] == pytest.approx(54 / 23, rel=1e-14)
    assert gamma_match(FadingParams(2, 2, 3, 2.0))[1] == pytest.approx(2 * 23 / 54, rel=1e-14)


@given(params, params)
def test_gamma_approx_products(p, q):
    g = gamma_approx(Scenario(p, (p, q)))
    assert min(g.psi1, g.psi2, g.phi1, g.phi2) > 0
    assert g.psi1 * g.psi2 == pytest.approx(p.mean_power, rel=1e-12)
    assert g.phi1 * g.phi2 == pytest.approx(p.mean_power + q.mean_power, rel=1e-12)


def test_interferer_sum_match_examples():
    one = FadingParams(2, 2, 3, 1.7)
    assert interferer_sum_match(Scenario(RAYLEIGH, (one,))) == pytest.approx(gamma_match(one), rel=1e-14)
    assert interferer_sum_match(rayleigh(2)) == pytest.approx((2.0, 1.0), rel=1e-14)
    # Nakagami powers with (psi1, psi2) = (1, 1) and (2, 1)
    s = Scenario(RAYLEIGH, (FadingParams(0, 1, 1, 1.0), FadingParams(0, 2, 1, 2.0)))
    assert interferer_sum_match(s) == pytest.approx((3.0, 1.0), rel=1e-14)


def test_interferer_sum_matches_sum_moments():
    s = PRESETS["table1-kms-beta3"]
    rng = RandomStream(11).generator()
    y = sum(sample_power(p, rng, 10**6) for p in s.interferers)
    phi1, phi2 = interferer_sum_match(s)
    assert y.mean() == pytest.approx(phi1 * phi2, rel=0.01)
    assert y.var() == pytest.approx(phi1 * phi2**2, rel=0.02)


def test_sampler_rayleigh_mean():
    x = sample_power(RAYLEIGH, RandomStream(1), 10**6)
    assert abs(x.mean() - 1.0) <= 0.005


def test_sampler_nakagami_variance():
    x = sample_power(FadingParams(0, 2.5, 7.0), RandomStream(2), 10**6)
    assert x.var() == pytest.approx(0.4, rel=0.01)


def test_sampler_shadowed_variance():
    x = sample_power(FadingParams(2, 2, 3), RandomStream(3), 10**6)
    assert x.var() == pytest.approx(23 / 54, rel=0.01)


GRID = list(itertools.product([0, 1, 2, 5], [0.8, 1, 2, 3.5], [0.5, 1, 3, 10]))


@pytest.mark.parametrize("kappa,mu,m", GRID)
def test_sampler_moments_on_grid(kappa, mu, m):
    p = FadingParams(kappa, mu, m, 1.3)
    x = sample_power(p, RandomStream(5, stream_id=GRID.index((kappa, mu, m))), 10**6)
    n = x.size
    mean, var = x.mean(), x.var(ddof=1)
    assert abs(mean - p.mean_power) <= 5 * math.sqrt(var / n)
    m4 = np.mean((x - mean) ** 4)
    se_var = math.sqrt((m4 - var**2) / n)
    psi1, _ = gamma_match(p)
    assert abs(var - p.mean_power**2 / psi1) <= 5 * se_var


@pytest.mark.parametrize("mu", [0.8, 1.0, 2.5])
def test_sampler_kappa_zero_is_gamma(mu):
    p = FadingParams(0, mu, 4.0, 2.0)
    x = sample_power(p, RandomStream(6), 10**6)
    assert ks_distance(x, lambda z: sps.gamma.cdf(z, mu, scale=2.0 / mu)) <= 0.002


def test_sample_sir_rayleigh_closed_forms():
    g1 = sample_sir(rayleigh(1), RandomStream(7), 10**6)
    g2 = sample_sir(rayleigh(2), RandomStream(8), 10**6)
    assert abs(np.mean(g1 <= 1) - 0.5) <= 0.002
    assert abs(np.mean(g2 <= 1) - 0.75) <= 0.002


def test_sample_sir_strong_interference_goes_to_zero():
    s = Scenario(RAYLEIGH, (FadingParams(0, 1, 1, 1e12),))
    assert np.max(sample_sir(s, RandomStream(9), 1000)) < 1e-6


def test_sampler_accepts_stream_generator_and_seed():
    a = sample_power(RAYLEIGH, RandomStream(4), 5)
    b = sample_power(RAYLEIGH, RandomStream(4).generator(), 5)
    c = sample_power(RAYLEIGH, 4, 5)
    assert np.array_equal(a, b) and np.array_equal(a, c)
    with pytest.raises(TypeError):
        sample_power(RAYLEIGH, "seed", 5)


def test_beta_prime_examples():
    s = rayleigh(1)
    assert beta_prime_sir_cdf(s, 1.0) == pytest.approx(0.5, abs=1e-15)
    assert beta_prime_sir_cdf(s, 0.0) == 0.0
    assert beta_prime_sir_cdf(s, 1e-12) < 1e-11
    assert beta_prime_sir_cdf(s, 1e12) > 1 - 1e-11
    assert beta_prime_sir_cdf(s, math.inf) == 1.0


@given(st.floats(0.01, 0.99))
def test_beta_prime_quantile_round_trip(q):
    s = PRESETS["table1-kms-beta2"]
    assert beta_prime_sir_cdf(s, beta_prime_sir_quantile(s, q)) == pytest.approx(q, abs=1e-12)


@pytest.mark.parametrize("name", TABLE1_COLUMNS)
def test_beta_prime_close_to_exact(name):
    s = PRESETS[name]
    z = np.logspace(-1.5, 2, 30)
    approx = np.array([beta_prime_sir_cdf(s, v) for v in z])
    assert np.all(np.diff(approx) >= 0)
    assert np.max(np.abs(approx - exact_cdf(s, z))) <= 0.03


@given(params, st.lists(params, min_size=1, max_size=3))
def test_json_round_trip(src, intf):
    s = Scenario(src, tuple(intf))
    assert Scenario.from_json(s.to_json()) == s


def test_json_schema_and_errors(tmp_path):
    text = '{"source": {"kappa": 2, "mu": 3, "m": 1}, "interferers": [{"kappa": 0, "mu": 1, "m": 1, "mean_power": 2}]}'
    path = tmp_path / "s.json"
    path.write_text(text)
    s = Scenario.load(path)
    assert s.source == FadingParams(2, 3, 1, 1.0)
    assert s.interferers[0].mean_power == 2.0
    with pytest.raises(ValueError):
        Scenario.from_json('{"source": {"kappa": 1, "mu": 1, "m": 1}}')
    with pytest.raises(ValueError):
        Scenario.from_json('{"source": {"kappa": 1, "mu": 1, "m": 1, "k": 2}, "interferers": []}')
