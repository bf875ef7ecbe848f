import math

import numpy as np
import pytest

from evtsir.evt import FrechetParams, frechet_cdf, frechet_params, frechet_sample
from evtsir.metrics import (
    FasConfig,
    QuadratureControl,
    QuadratureError,
    ergodic_rate_asymptotic,
    ergodic_rate_mc,
    fas_rate_upper_bound,
    fas_simulated_rate,
    outage_asymptotic,
    outage_exact_mc,
    sample_top_order_stats,
)
from evtsir.presets import PRESETS, TABLE1_COLUMNS
from evtsir.sirdist import exact_cdf
from evtsir.stats import ks_distance
from evtsir.streams import RandomStream

from oracles import rayleigh


def test_fas_config_validation():
    for bad in [(1, 1), (8, 0), (8, 9)]:
        with pytest.raises(ValueError):
            FasConfig(*bad)
    with pytest.raises(ValueError):
        FasConfig(8, 2, mc_samples=1)


def test_outage_asymptotic_examples():
    fp = frechet_params(rayleigh(1), 20)
    assert outage_asymptotic(fp, fp.scale) == pytest.approx(math.exp(-1), rel=1e-12)
    assert outage_asymptotic(fp, 19.0) == pytest.approx(0.3679, abs=5e-5)
    assert outage_asymptotic(fp, 1e300) == 1.0
    with pytest.raises(ValueError):
        outage_asymptotic(fp, 0.0)


def test_outage_mc_examples():
    s = rayleigh(1)
    est = outage_exact_mc(s, 20, 19.0, 10**6)
    assert abs(est.mean - 0.95**20) <= 3 * est.stderr
    assert est.n == 10**6
    # the 1e-6 quantile of the max of 20 draws is about 0.5
    assert outage_exact_mc(s, 20, 0.05, 10**4).mean == 0.0
    with pytest.raises(ValueError):
        outage_exact_mc(s, 20, 1.0, 9999)
    with pytest.raises(ValueError):
        outage_exact_mc(s, 20, -1.0, 10**4)


@pytest.mark.parametrize("name", TABLE1_COLUMNS)
def test_outage_mc_matches_exact_power(name):
    s = PRESETS[name]
    gamma_t = 3.0
    est = outage_exact_mc(s, 32, gamma_t, 10**5, RandomStream(41, 2))
    assert abs(est.mean - float(exact_cdf(s, gamma_t)) ** 32) <= 3 * est.stderr


@pytest.mark.parametrize("name", TABLE1_COLUMNS)
def test_outage_asymptotic_close_to_simulation(name):
    s = PRESETS[name]
    fp = frechet_params(s, 64)
    for u in (0.5, 1.0, 2.0):
        est = outage_exact_mc(s, 64, u * fp.scale, 10**4, RandomStream(42, 2))
        assert abs(outage_asymptotic(fp, u * fp.scale) - est.mean) <= max(0.02, 3 * est.stderr)


def test_rate_asymptotic_examples():
    assert ergodic_rate_asymptotic(FrechetParams(1e-12, 2.0)) < 1e-11
    assert ergodic_rate_asymptotic(FrechetParams(10.0, 2.0)) > ergodic_rate_asymptotic(FrechetParams(5.0, 2.0))


def test_rate_asymptotic_against_frechet_monte_carlo():
    fp = FrechetParams(19.0, 1.0)
    x = frechet_sample(fp, RandomStream(43), 10**7)
    oracle = float(np.mean(np.log2(1 + x)))
    assert ergodic_rate_asymptotic(fp) == pytest.approx(oracle, rel=0.005)


@pytest.mark.parametrize("a,beta", [(19.0, 1.0), (3.0, 2.0), (50.0, 0.5), (0.2, 4.0)])
def test_rate_quadrature_settled(a, beta):
    fp = FrechetParams(a, beta)
    base = ergodic_rate_asymptotic(fp)
    finer = ergodic_rate_asymptotic(fp, QuadratureControl(rel_tol=1e-12, h0=0.125))
    assert math.isfinite(base)
    assert finer == pytest.approx(base, rel=1e-8)


def test_rate_quadrature_failure_is_reported():
    with pytest.raises(QuadratureError):
        ergodic_rate_asymptotic(FrechetParams(19.0, 1.0), QuadratureControl(rel_tol=1e-30, max_halvings=2))


def test_rate_mc_examples():
    s = rayleigh(1)
    one = ergodic_rate_mc(s, 1, 10**6)
    assert abs(one.mean - 1 / math.log(2)) <= 3 * one.stderr
    rates = [ergodic_rate_mc(s, L, 10**4).mean for L in (4, 32, 256)]
    assert rates[0] < rates[1] < rates[2]
    with pytest.raises(ValueError):
        ergodic_rate_mc(s, 4, 100)


def test_rate_mc_near_asymptotic_at_512():
    s = rayleigh(1)
    mc = ergodic_rate_mc(s, 512, 2 * 10**4)
    assert mc.mean == pytest.approx(ergodic_rate_asymptotic(frechet_params(s, 512)), rel=0.02)


def test_top_order_stats_shape_and_order():
    fp = FrechetParams(4.0, 2.0)
    one = sample_top_order_stats(fp, 5, RandomStream(44))
    assert one.shape == (5,) and np.all(np.diff(one) < 0)
    many = sample_top_order_stats(fp, 5, RandomStream(44), size=1000)
    assert many.shape == (1000, 5) and np.all(np.diff(many, axis=1) < 0)
    with pytest.raises(ValueError):
        sample_top_order_stats(fp, 0)


def test_top_order_stats_first_is_frechet():
    fp = FrechetParams(4.0, 2.0)
    x = sample_top_order_stats(fp, 1, RandomStream(45), size=10**6)[:, 0]
    assert ks_distance(x, lambda z: frechet_cdf(fp, z)) <= 0.002


def test_fas_bound_reduces_to_rate():
    fp = frechet_params(PRESETS["fig12-fas"], 64)
    est = fas_rate_upper_bound(fp, FasConfig(64, 1, 10**5))
    assert abs(est.mean - ergodic_rate_asymptotic(fp)) <= 3 * est.stderr


def test_fas_bound_increments_positive_and_shrinking():
    fp = frechet_params(PRESETS["fig12-fas"], 64)
    x = sample_top_order_stats(fp, 8, RandomStream(46), size=10**5)
    inc = np.log2(1 + x).mean(axis=0)
    assert np.all(inc > 0) and np.all(np.diff(inc) < 0)
    bounds = [fas_rate_upper_bound(fp, FasConfig(64, k, 10**5)).mean for k in (1, 2, 4, 8)]
    assert all(x < y for x, y in zip(bounds, bounds[1:]))


def test_fas_simulated_all_antennas_is_sum_of_rates():
    s = rayleigh(1)
    est = fas_simulated_rate(s, FasConfig(4, 4, 10**5))
    assert abs(est.mean - 4 / math.log(2)) <= 3 * est.stderr


def test_fas_simulated_nondecreasing():
    s = PRESETS["fig13-fas"]
    vals = [fas_simulated_rate(s, FasConfig(32, k, 2 * 10**4)).mean for k in (1, 2, 4, 8)]
    assert all(x <= y for x, y in zip(vals, vals[1:]))


def test_fas_bound_above_simulation():
    s = PRESETS["fig12-fas"]
    cfg = FasConfig(64, 4, 2 * 10**4)
    ub = fas_rate_upper_bound(frechet_params(s, 64), cfg)
    sim = fas_simulated_rate(s, cfg)
    assert ub.mean >= sim.mean - 3 * math.hypot(ub.stderr, sim.stderr)
