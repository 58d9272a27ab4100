"""Monte Carlo estimates of the LOS coverage probability.

A trial places the typical user at the origin, samples the geometry
around it and either draws every blockage indicator (``bernoulli``) or
returns the exact coverage probability given the sampled geometry
(``conditional``):

    1 - prod_j (1 - p_j) * prod_i [1 - q_i (1 - prod_j (1 - p_ij))]

where p_j are direct LOS probabilities of BSs inside c0, q_i the
RIS-to-user LOS probabilities and p_ij the LOS probabilities of feeds
that clear the SNR threshold. Blockages are independent per link, so
averaging this over trials is unbiased and has lower variance.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import os

import numba
import numpy as np
from numba import njit, prange

from . import rng
from .channel import truncation_distance
from .geometry import ANGLE_MODES, _check_density, _disk_ppp, _line_points, _line_process, _typical_theta
from .params import NetworkParams, Thresholds, derived_thresholds, validate
from .rng import BLOCK_DIRECT, BLOCK_FEED, BLOCK_USER, BS, BS_LOCAL, LINES, RIS, stream_id, uniform_pair

if "NUMBA_THREADING_LAYER" not in os.environ:
    numba.config.THREADING_LAYER = "workqueue"

ESTIMATORS = ("bernoulli", "conditional")
Z95 = 1.959963984540054
CHUNK = 1 << 15  # fixed, so sums do not depend on the worker count
MAX_EXPECTED_BS = 2e7


@dataclass(frozen=True)
class SimConfig:
    trials: int = 20_000
    seed: int = 1
    estimator: str = "conditional"
    epsilon_trunc: float = 1e-9
    angle_mode: str = "isotropic"
    workers: int = 1
    pin_typical_angle: bool = False
    # diagnostic: every RIS sees its own BS process (drops the correlation
    # between feeds and direct links that a shared BS process creates)
    independent_feeds: bool = False

    def __post_init__(self):
        problems = []
        if not isinstance(self.trials, int) or self.trials < 0:
            problems.append("trials must be a nonnegative integer")
        elif self.trials >= rng.MAX_TRIALS:
            problems.append("trials must be below 2**32")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            problems.append("seed must be a 64-bit unsigned integer")
        if self.estimator not in ESTIMATORS:
            problems.append(f"estimator must be one of {ESTIMATORS}")
        if not 0 < self.epsilon_trunc < 1:
            problems.append("epsilon_trunc must lie in (0, 1)")
        if self.angle_mode not in ANGLE_MODES:
            problems.append(f"angle_mode must be one of {ANGLE_MODES}")
        if not isinstance(self.workers, int) or self.workers < 1:
            problems.append("workers must be a positive integer")
        if problems:
            raise ValueError("; ".join(problems))


@dataclass
class CoverageEstimate:
    p_hat: float
    ci95_halfwidth: float
    trials: int
    breakdown: dict = field(default_factory=dict)
    estimator: str = "conditional"
    ci95_low: float = 0.0
    ci95_high: float = 0.0

    def to_dict(self):
        return asdict(self)


# --- trial kernel ------------------------------------------------------------


@njit(cache=True)
def _feed_failure(key0, key1, tag, trial, bernoulli, line_id, band_side, pidx,
                  px, py, t, q, feed_r, t2, eta2, bx, by, br, lam, independent):
    """Failure probability (or 0/1 failure flag) of one RIS."""
    search = min(feed_r, t2)
    if independent:
        # private BS process around this RIS, centred on it
        bx, by, br = _disk_ppp(key0, key1, stream_id(tag, BS_LOCAL, line_id, band_side),
                               trial, lam, search, pidx + 1)
        px = 0.0
        py = 0.0
        t = 0.0
    lo = np.searchsorted(br, t - search)
    hi = np.searchsorted(br, t + search, side="right")
    if bernoulli:
        u, _ = uniform_pair(key0, key1, pidx, stream_id(tag, BLOCK_USER, line_id, band_side), trial, 0)
        if u >= q:
            return 1.0
        sid = stream_id(tag, BLOCK_FEED, line_id, band_side)
        for j in range(lo, hi):
            d1 = math.hypot(bx[j] - px, by[j] - py)
            if d1 < feed_r and d1 <= t2:
                w, _ = uniform_pair(key0, key1, j, sid, trial, pidx + 1)
                if w < math.exp(-d1 / eta2):
                    return 0.0
        return 1.0
    unfed = 1.0
    for j in range(lo, hi):
        d1 = math.hypot(bx[j] - px, by[j] - py)
        if d1 < feed_r and d1 <= t2:
            unfed *= 1.0 - math.exp(-d1 / eta2)
    return 1.0 - q * (1.0 - unfed)


@njit(cache=True)
def _trial(key0, key1, tag, trial, vehicle, bernoulli, manhattan, pin_theta, independent,
           lam, lam_l, mu, alpha1, alpha2, eta1, eta2, c0, c2,
           r_online, r_offline, t2, r_bs):
    """One trial: (value, direct share, on-line share, off-line share)."""
    bx, by, br = _disk_ppp(key0, key1, stream_id(tag, BS, 0, 0), trial, lam, r_bs)

    # direct links; br is sorted
    fail_direct = 1.0
    sid = stream_id(tag, BLOCK_DIRECT, 0, 0)
    for j in range(br.shape[0]):
        d = br[j]
        if d >= c0:
            break
        p = math.exp(-d / eta2)
        if bernoulli:
            u, _ = uniform_pair(key0, key1, j, sid, trial, 0)
            if u < p:
                fail_direct = 0.0
                break
        else:
            fail_direct *= 1.0 - p

    fail_online = 1.0
    if vehicle and mu > 0.0:
        theta0 = 0.0 if pin_theta else _typical_theta(key0, key1, tag, trial, manhattan)
        ct = math.cos(theta0)
        st = math.sin(theta0)
        ss, bsd, idx = _line_points(key0, key1, tag, RIS, 0, trial, r_online, mu)
        for i in range(ss.shape[0]):
            t = abs(ss[i])
            q = math.exp(-t / eta1)
            feed_r = c2 * t ** (-alpha1 / alpha2)
            fail_online *= _feed_failure(key0, key1, tag, trial, bernoulli, 0, bsd[i], idx[i],
                                         ss[i] * ct, ss[i] * st, t, q, feed_r, t2, eta2, bx, by, br, lam, independent)
            if fail_online == 0.0:
                break

    fail_offline = 1.0
    if mu > 0.0 and lam_l > 0.0:
        lr, lth = _line_process(key0, key1, stream_id(tag, LINES, 0, 0), trial, lam_l, r_offline, manhattan)
        for k in range(lr.shape[0]):
            half = math.sqrt(max(r_offline * r_offline - lr[k] * lr[k], 0.0))
            nx = -math.sin(lth[k])
            ny = math.cos(lth[k])
            dx = math.cos(lth[k])
            dy = math.sin(lth[k])
            ss, bsd, idx = _line_points(key0, key1, tag, RIS, k + 1, trial, half, mu)
            for i in range(ss.shape[0]):
                px = lr[k] * nx + ss[i] * dx
                py = lr[k] * ny + ss[i] * dy
                t = math.hypot(lr[k], ss[i])
                q = math.exp(-t / eta2)
                feed_r = c2 / t
                fail_offline *= _feed_failure(key0, key1, tag, trial, bernoulli, k + 1, bsd[i], idx[i],
                                              px, py, t, q, feed_r, t2, eta2, bx, by, br, lam, independent)
                if fail_offline == 0.0:
                    break
            if fail_offline == 0.0:
                break

    # attribution in the order direct -> on-line RIS -> off-line RIS
    direct = 1.0 - fail_direct
    online = fail_direct * (1.0 - fail_online)
    offline = fail_direct * fail_online * (1.0 - fail_offline)
    return 1.0 - fail_direct * fail_online * fail_offline, direct, online, offline


@njit(cache=True, parallel=True)
def _run(start, n, key0, key1, tag, vehicle, bernoulli, manhattan, pin_theta, independent,
         lam, lam_l, mu, alpha1, alpha2, eta1, eta2, c0, c2, r_online, r_offline, t2, r_bs):
    out = np.empty((n, 4))
    for i in prange(n):
        v, a, b, c = _trial(key0, key1, tag, start + i, vehicle, bernoulli, manhattan, pin_theta, independent,
                            lam, lam_l, mu, alpha1, alpha2, eta1, eta2, c0, c2,
                            r_online, r_offline, t2, r_bs)
        out[i, 0] = v
        out[i, 1] = a
        out[i, 2] = b
        out[i, 3] = c
    return out


# --- windows and argument packing ---------------------------------------------


def windows(params: NetworkParams, th: Thresholds, config: SimConfig, population: str):
    """Sampling radii: (on-line RIS, off-line RIS, feed truncation, BS window)."""
    t1 = truncation_distance(params.eta_1, config.epsilon_trunc)
    t2 = truncation_distance(params.eta_2, config.epsilon_trunc)
    if population == "no_ris":
        return 0.0, 0.0, t2, min(th.c0, t2)
    r_online = min(th.c1, t1) if population == "vehicle" else 0.0
    r_offline = min(th.c2, t2)
    has_ris = params.mu > 0 and (params.lambda_l > 0 or population == "vehicle")
    r_ris = max(r_online, r_offline) if has_ris else 0.0
    if config.independent_feeds or not has_ris:
        return r_online, r_offline, t2, th.c0
    return r_online, r_offline, t2, max(th.c0, r_ris + t2)


def _kernel_args(params, config, population, tag):
    validate(params)
    _check_density("mu", params.mu)
    th = derived_thresholds(params)
    r_online, r_offline, t2, r_bs = windows(params, th, config, population)
    if math.pi * params.lambda_bs * r_bs**2 > MAX_EXPECTED_BS:
        raise ValueError(
            f"BS window of {r_bs:.3g} m holds too many stations; raise epsilon_trunc"
        )
    key0, key1 = rng.split_seed(config.seed)
    no_ris = population == "no_ris"
    return (
        key0, key1, tag,
        population == "vehicle",
        config.estimator == "bernoulli",
        config.angle_mode == "manhattan",
        config.pin_typical_angle,
        config.independent_feeds,
        params.lambda_bs,
        0.0 if no_ris else params.lambda_l,
        0.0 if no_ris else params.mu,
        params.alpha_1, params.alpha_2, params.eta_1, params.eta_2,
        th.c0, th.c2, r_online, r_offline, t2, r_bs,
    )


def trial_values(params, config, population="vehicle", start=0, n=None, tag=0):
    """Per-trial values, shape (n, 4): value and the three attribution shares."""
    if population not in ("vehicle", "handset", "no_ris"):
        raise ValueError("population must be vehicle, handset or no_ris")
    n = config.trials if n is None else n
    args = _kernel_args(params, config, population, tag)
    numba.set_num_threads(min(config.workers, numba.config.NUMBA_NUM_THREADS))
    key0, key1, tag_, *rest = args
    return _run(start, n, key0, key1, tag_, *rest)


def run_trial_vehicle(params, th, config, trial: int) -> float:
    """Covered flag (bernoulli) or conditional coverage probability of one trial."""
    key0, key1, tag, *rest = _kernel_args(params, config, "vehicle", 0)
    return _trial(key0, key1, tag, trial, *rest)[0]


def run_trial_handset(params, th, config, trial: int) -> float:
    key0, key1, tag, *rest = _kernel_args(params, config, "handset", 0)
    return _trial(key0, key1, tag, trial, *rest)[0]


# --- aggregation ------------------------------------------------------------


def wilson_interval(successes, n, z=Z95):
    if n == 0:
        return 0.0, 1.0
    p = successes / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z / denom * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
    lo = 0.0 if successes == 0 else max(centre - half, 0.0)
    hi = 1.0 if successes == n else min(centre + half, 1.0)
    return lo, hi


def _estimate(params, config, population, tag=0) -> CoverageEstimate:
    if config.trials < 1:
        raise ValueError("at least one trial is required")
    n = config.trials
    # fixed-size chunks merged in order: bit-identical for any worker count
    count, mean, m2 = 0, np.zeros(4), np.zeros(4)
    for start in range(0, n, CHUNK):
        block = trial_values(params, config, population, start, min(CHUNK, n - start), tag)
        bn = block.shape[0]
        bmean = block.mean(axis=0)
        bm2 = ((block - bmean) ** 2).sum(axis=0)
        delta = bmean - mean
        total = count + bn
        mean = mean + delta * bn / total
        m2 = m2 + bm2 + delta**2 * count * bn / total
        count = total
    p_hat = float(mean[0])
    breakdown = {"direct": float(mean[1]), "on_line_ris": float(mean[2]), "off_line_ris": float(mean[3])}
    if config.estimator == "bernoulli":
        successes = round(p_hat * n)
        lo, hi = wilson_interval(successes, n)
        half = (hi - lo) / 2
    else:
        sd = math.sqrt(m2[0] / (n - 1)) if n > 1 else 0.0
        half = Z95 * sd / math.sqrt(n)
        lo, hi = max(p_hat - half, 0.0), min(p_hat + half, 1.0)
    return CoverageEstimate(p_hat, half, n, breakdown, config.estimator, lo, hi)


def estimate_no_ris(params: NetworkParams, config: SimConfig) -> CoverageEstimate:
    return _estimate(params, config, "no_ris")


def estimate_vehicle(params: NetworkParams, config: SimConfig, tag=0) -> CoverageEstimate:
    return _estimate(params, config, "vehicle", tag)


def estimate_handset(params: NetworkParams, config: SimConfig, tag=0) -> CoverageEstimate:
    return _estimate(params, config, "handset", tag)


def estimate_parts(params: NetworkParams, config: SimConfig) -> dict:
    """Vehicle, handset and mixture estimates; the classes use independent streams."""
    w1 = params.vehicle_weight
    w2 = 1.0 - w1
    parts = {}
    if w1 > 0:
        parts["vehicle"] = (w1, estimate_vehicle(params, config, tag=0))
    if w2 > 0:
        parts["handset"] = (w2, estimate_handset(params, config, tag=1))
    p_hat = sum(w * e.p_hat for w, e in parts.values())
    half = math.sqrt(sum((w * e.ci95_halfwidth) ** 2 for w, e in parts.values()))
    breakdown = {
        k: sum(w * e.breakdown[k] for w, e in parts.values())
        for k in ("direct", "on_line_ris", "off_line_ris")
    }
    out = {k: e for k, (_, e) in parts.items()}
    out["total"] = CoverageEstimate(p_hat, half, config.trials, breakdown, config.estimator,
                                    max(p_hat - half, 0.0), min(p_hat + half, 1.0))
    return out


def estimate_total(params: NetworkParams, config: SimConfig) -> CoverageEstimate:
    """Population mixture with weights from the user densities."""
    return estimate_parts(params, config)["total"]
