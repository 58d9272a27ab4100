import math

import numpy as np
import pytest

from riscov.analytic import AnalyticOptions, cov_no_ris, cov_vehicle
from riscov.montecarlo import (
    SimConfig, estimate_handset, estimate_no_ris, estimate_parts, estimate_total, estimate_vehicle,
    run_trial_handset, run_trial_vehicle, trial_values, wilson_interval, windows,
)
from riscov.params import PER_KM, NetworkParams, ParameterError, derived_thresholds

P = NetworkParams()
TH = derived_thresholds(P)
FAST = SimConfig(trials=4000, seed=21)


def close(a, b, sigma_a, sigma_b=0.0, k=3.0):
    return abs(a.p_hat - b) <= k * math.hypot(sigma_a, sigma_b) + 1e-12


def sd(est):
    return est.ci95_halfwidth / 1.959963984540054


def test_config_validation():
    for bad in (dict(trials=-1), dict(seed=-3), dict(estimator="mean"), dict(epsilon_trunc=0.0),
                dict(angle_mode="polar"), dict(workers=0)):
        with pytest.raises(ValueError):
            SimConfig(**bad)
    with pytest.raises(ValueError):
        estimate_vehicle(P, SimConfig(trials=0))


@pytest.mark.parametrize("estimator", ["bernoulli", "conditional"])
def test_no_base_stations_never_covered(estimator):
    p = P.replace(lambda_bs=0.0)
    cfg = SimConfig(trials=3000, seed=2, estimator=estimator)
    for est in (estimate_vehicle(p, cfg), estimate_handset(p, cfg), estimate_no_ris(p, cfg)):
        assert est.p_hat == 0.0
    assert run_trial_vehicle(p, TH, cfg, 5) == 0.0


def test_no_ris_matches_closed_form():
    est = estimate_no_ris(P, SimConfig(trials=20000, seed=3, estimator="bernoulli"))
    assert abs(est.p_hat - cov_no_ris(P)) <= max(3 * est.ci95_halfwidth, 0.01)
    assert est.ci95_low < est.p_hat < est.ci95_high


def test_no_blockage_limit():
    p = P.replace(eta_2=1e6)
    est = estimate_no_ris(p, SimConfig(trials=20000, seed=4, estimator="bernoulli"))
    expected = 1 - math.exp(-p.lambda_bs * math.pi * TH.c0**2)
    assert abs(est.p_hat - expected) <= 3 * est.ci95_halfwidth


def test_ris_free_reductions():
    base = estimate_no_ris(P, FAST)
    veh = estimate_vehicle(P.replace(mu=0.0), FAST)
    hand = estimate_handset(P.replace(lambda_l=0.0), FAST)
    hand_mu = estimate_handset(P.replace(mu=0.0), FAST)
    for est in (veh, hand, hand_mu):
        assert close(est, base.p_hat, sd(est), sd(base))


def test_vehicle_dominates_handset_per_trial():
    v = trial_values(P, FAST, "vehicle", 0, 3000)[:, 0]
    h = trial_values(P, FAST, "handset", 0, 3000)[:, 0]
    assert np.all(v >= h - 1e-15)
    assert v.mean() > h.mean()


def test_breakdown_sums_to_estimate():
    for estimator in ("bernoulli", "conditional"):
        est = estimate_vehicle(P, SimConfig(trials=3000, seed=5, estimator=estimator))
        assert sum(est.breakdown.values()) == pytest.approx(est.p_hat, abs=1e-12)
        assert est.breakdown["on_line_ris"] > 0


def test_bernoulli_trials_are_flags():
    cfg = SimConfig(estimator="bernoulli")
    vals = {run_trial_vehicle(P, TH, cfg, i) for i in range(200)} | {run_trial_handset(P, TH, cfg, i) for i in range(200)}
    assert vals <= {0.0, 1.0}
    cond = [run_trial_vehicle(P, TH, SimConfig(), i) for i in range(200)]
    assert all(0.0 <= x <= 1.0 for x in cond)


def test_deterministic_and_worker_independent():
    a = estimate_vehicle(P, SimConfig(trials=5000, seed=9, workers=1))
    b = estimate_vehicle(P, SimConfig(trials=5000, seed=9, workers=4))
    c = estimate_vehicle(P, SimConfig(trials=5000, seed=9, workers=1))
    assert a.to_dict() == b.to_dict() == c.to_dict()
    d = estimate_vehicle(P, SimConfig(trials=5000, seed=10))
    assert d.p_hat != a.p_hat


def test_trials_independent_of_evaluation_order():
    whole = trial_values(P, FAST, "vehicle", 0, 600)
    parts = np.concatenate([trial_values(P, FAST, "vehicle", 300, 300), trial_values(P, FAST, "vehicle", 0, 300)])
    np.testing.assert_array_equal(whole, np.concatenate([parts[300:], parts[:300]]))


def test_estimators_agree_and_conditional_is_tighter():
    cond = estimate_vehicle(P, SimConfig(trials=20000, seed=11))
    bern = estimate_vehicle(P, SimConfig(trials=20000, seed=12, estimator="bernoulli"))
    assert abs(cond.p_hat - bern.p_hat) <= 3 * math.hypot(sd(cond), sd(bern))
    assert cond.ci95_halfwidth < bern.ci95_halfwidth


def test_angle_mode_invariance():
    iso = estimate_vehicle(P, SimConfig(trials=10000, seed=13))
    man = estimate_vehicle(P, SimConfig(trials=10000, seed=14, angle_mode="manhattan"))
    assert abs(iso.p_hat - man.p_hat) <= 3 * math.hypot(sd(iso), sd(man))
    pinned = estimate_vehicle(P, SimConfig(trials=10000, seed=15, pin_typical_angle=True))
    assert abs(iso.p_hat - pinned.p_hat) <= 3 * math.hypot(sd(iso), sd(pinned))


@pytest.mark.parametrize("population", ["vehicle", "handset"])
def test_monotone_coupling_in_density_and_elements(population):
    cfg = SimConfig(trials=1500, seed=16)
    base = trial_values(P, cfg, population)[:, 0]
    for change in (dict(mu=2 * P.mu), dict(mu=P.mu + 0.3 * PER_KM), dict(n_r=100), dict(n_r=P.n_r + 1)):
        more = trial_values(P.replace(**change), cfg, population)[:, 0]
        assert np.all(more >= base - 1e-12), change
    low = trial_values(P.replace(n_r=1), cfg, population)[:, 0]
    assert np.all(base >= low - 1e-12)


def test_truncation_halving():
    a = estimate_vehicle(P, SimConfig(trials=20000, seed=17))
    b = estimate_vehicle(P, SimConfig(trials=20000, seed=17, epsilon_trunc=0.5e-9))
    assert abs(a.p_hat - b.p_hat) < a.ci95_halfwidth


def test_windows():
    cfg = SimConfig()
    r_on, r_off, t2, r_bs = windows(P, TH, cfg, "vehicle")
    assert r_on == pytest.approx(48 * math.log(1e9))
    assert r_off == pytest.approx(36 * math.log(1e9))
    assert r_bs == pytest.approx(max(r_on, r_off) + t2)
    assert windows(P, TH, cfg, "no_ris")[3] == pytest.approx(TH.c0)


def test_mixture_weights():
    cfg = SimConfig(trials=2000, seed=18)
    parts = estimate_parts(P, cfg)
    assert parts["total"].p_hat == pytest.approx(0.2 * parts["vehicle"].p_hat + 0.8 * parts["handset"].p_hat)
    assert estimate_total(P.replace(nu=0.0), cfg).p_hat == estimate_handset(P, cfg, tag=1).p_hat
    assert estimate_total(P.replace(lambda_2=0.0), cfg).p_hat == estimate_vehicle(P, cfg).p_hat
    with pytest.raises(ParameterError):
        estimate_total(P.replace(nu=0.0, lambda_2=0.0), cfg)


def test_independent_feeds_reproduce_product_formula():
    # each RIS with its own BS process is exactly the factorised model
    est = estimate_vehicle(P, SimConfig(trials=12000, seed=19, independent_feeds=True))
    assert abs(est.p_hat - cov_vehicle(P, AnalyticOptions("consistent"))) <= 3 * sd(est)


def test_wilson_interval():
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0 and 0 < hi < 0.05
    lo, hi = wilson_interval(50, 100)
    assert lo == pytest.approx(0.4038, abs=1e-4) and hi == pytest.approx(0.5962, abs=1e-4)
