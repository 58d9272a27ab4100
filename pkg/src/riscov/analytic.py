"""Closed-form and quadrature evaluation of the LOS coverage probabilities.

Everything reduces to three nonnegative exponents

    A   direct links from the BS PPP
    S1  RISs on the user's own road (vehicle users only)
    S2  RISs on every other road

with P_cov = 1 - exp(-(A + S1 + S2)) for vehicles and 1 - exp(-(A + S2))
for handsets. Two variants of S1/S2 are provided:

``paper``
    1 - f is (1 - blocked RIS-user link * all feeds blocked), RISs on the
    own road integrated over one side, the line term with weight lambda_l.
``consistent``
    The per-RIS failure event is the union "RIS-user link blocked or no
    LOS feed", i.e. the exponent integrand is e^{-t/eta} (1 - e^{-z}); both
    sides of the own road (2 mu) and signed line offsets (2 lambda_l).
    This is what the simulator computes, up to the correlation the shared
    BS process induces between the direct term and the feeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .channel import truncation_distance
from .params import NetworkParams, ParameterError, Thresholds, derived_thresholds, validate
from .quadrature import QuadratureError, integrate, integrate_batch

VARIANTS = ("paper", "consistent")

# below this x = X / eta the closed form loses digits to cancellation
_SERIES_SWITCH = 0.5
_SERIES_TERMS = 20


@dataclass(frozen=True)
class AnalyticOptions:
    variant: str = "consistent"
    rel_tol: float = 1e-7
    abs_tol: float = 1e-13
    epsilon_int: float = 1e-12

    def __post_init__(self):
        problems = []
        if self.variant not in VARIANTS:
            problems.append(f"variant must be one of {VARIANTS}")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            problems.append("tolerances must be positive")
        if not 0 < self.epsilon_int < 1:
            problems.append("epsilon_int must lie in (0, 1)")
        if problems:
            raise ParameterError(problems)

    def with_variant(self, variant):
        return AnalyticOptions(variant, self.rel_tol, self.abs_tol, self.epsilon_int)


@dataclass(frozen=True)
class Exponents:
    direct: float  # A
    on_line: float  # S1
    off_line: float  # S2


def _series_coefficients():
    # x^2 (1/2 - x/3 + x^2/8 - ...): sum_{n>=2} (-1)^n (n - 1) x^n / n!
    return np.array([(-1) ** n * (n - 1) / math.factorial(n) for n in range(2, 2 + _SERIES_TERMS)])


_COEF = _series_coefficients()


def inner_integral(X, eta):
    """int_0^X r exp(-r/eta) dr = eta^2 (1 - e^{-x}(1 + x)), x = X/eta.

    Accepts arrays; X may be +inf (limit eta^2).
    """
    X = np.asarray(X, dtype=float)
    eta = np.asarray(eta, dtype=float)
    if np.any(X < 0) or np.any(eta <= 0):
        raise ValueError("inner_integral needs X >= 0 and eta > 0")
    x = X / eta
    with np.errstate(invalid="ignore", over="ignore"):
        closed = -np.expm1(-x) - x * np.exp(-x)
    closed = np.where(np.isinf(x), 1.0, closed)
    small = x < _SERIES_SWITCH
    if np.any(small):
        xs = np.where(small, x, 0.0)
        powers = xs[..., None] ** np.arange(2, 2 + _SERIES_TERMS)
        closed = np.where(small, powers @ _COEF, closed)
    out = eta**2 * closed
    return float(out) if out.ndim == 0 else out


# --- per-RIS integrands -----------------------------------------------------


def _feed_exponent(radius, p: NetworkParams):
    """2 pi lambda I(radius, eta_2): mean number of LOS BSs within ``radius``."""
    return 2.0 * math.pi * p.lambda_bs * inner_integral(radius, p.eta_2)


def _safe_div(num, den):
    den = np.asarray(den, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(den > 0, num / np.where(den > 0, den, 1.0), np.inf)


def _one_minus_f(t, eta, radius, p, variant):
    """Integrand of the RIS exponent at distance ``t``, feed disk ``radius``."""
    z = _feed_exponent(radius, p)
    if variant == "paper":
        # 1 - (1 - e^{-t/eta}) e^{-z}, arranged to avoid cancellation
        return -np.expm1(-z) + np.exp(-t / eta - z)
    return np.exp(-t / eta) * -np.expm1(-z)


def _check_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise ValueError("t must be positive")
    return t


def f1(t, params: NetworkParams, opts: AnalyticOptions = AnalyticOptions()):
    """Failure term of an RIS at distance t on the user's road."""
    t = _check_t(t)
    th = derived_thresholds(params)
    out = 1.0 - _one_minus_f(t, params.eta_1, th.c2 / t**th.rho, params, opts.variant)
    return float(out) if out.ndim == 0 else out


def f2(t, params: NetworkParams, opts: AnalyticOptions = AnalyticOptions()):
    """Failure term of an off-road RIS at distance t."""
    t = _check_t(t)
    th = derived_thresholds(params)
    out = 1.0 - _one_minus_f(t, params.eta_2, th.c2 / t, params, opts.variant)
    return float(out) if out.ndim == 0 else out


# --- exponents --------------------------------------------------------------


def _geometric_points(start, stop, ratio=4.0):
    pts = []
    x = start
    while x < stop:
        pts.append(x)
        x *= ratio
    return pts


def _on_line_exponent(p: NetworkParams, th: Thresholds, opts: AnalyticOptions):
    if p.mu == 0:
        return 0.0
    if opts.variant == "consistent" and p.lambda_bs == 0:
        return 0.0
    upper = th.c1
    if opts.variant == "consistent":
        upper = min(upper, truncation_distance(p.eta_1, opts.epsilon_int))
    # kinks sit near eta_1 and where the feed disk shrinks to eta_2
    knee = (th.c2 / p.eta_2) ** (1.0 / th.rho)
    points = sorted(set(_geometric_points(p.eta_1 / 8, upper) + [knee]))

    def g(t):
        return _one_minus_f(t, p.eta_1, th.c2 / t**th.rho, p, opts.variant)

    value, _ = integrate(g, 0.0, upper, opts.rel_tol, opts.abs_tol / max(p.mu, 1e-300), points=points)
    weight = p.mu if opts.variant == "paper" else 2.0 * p.mu
    return weight * value


def _middle(u, p, th, opts, t_max):
    """int_0^{t_max(u)} (1 - f2(sqrt(u^2 + t^2))) dt for every u."""
    u = np.asarray(u, dtype=float)

    def g(t, owner):
        d = np.hypot(u[owner], t)
        return _one_minus_f(d, p.eta_2, _safe_div(th.c2, d), p, opts.variant)

    upper = t_max(u)
    # one breakpoint a few blockage lengths out helps the consistent decay
    bp = np.minimum(upper, 4.0 * p.eta_2)[:, None]
    value, _ = integrate_batch(g, np.zeros_like(u), upper, opts.rel_tol / 10, opts.abs_tol, bp)
    return value


def _off_line_exponent(p: NetworkParams, th: Thresholds, opts: AnalyticOptions):
    if p.mu == 0 or p.lambda_l == 0:
        return 0.0
    if opts.variant == "consistent" and p.lambda_bs == 0:
        return 0.0
    c2 = th.c2
    if opts.variant == "paper":
        upper = c2

        def t_max(u):
            return np.sqrt(np.maximum(c2 * c2 - u * u, 0.0))

    else:
        t2 = truncation_distance(p.eta_2, opts.epsilon_int)
        upper = min(c2, t2)

        def t_max(u):
            return np.minimum(np.sqrt(np.maximum(c2 * c2 - u * u, 0.0)), t2)

    def outer(u, _owner):
        flat = u.ravel()
        m = _middle(flat, p, th, opts, t_max)
        return (-np.expm1(-2.0 * p.mu * m)).reshape(u.shape)

    points = [x for x in (p.eta_2, 4.0 * p.eta_2, 16.0 * p.eta_2) if x < upper]
    value, _ = integrate_batch(outer, [0.0], [upper], opts.rel_tol, opts.abs_tol / p.lambda_l,
                               np.array([points + [np.nan]]))
    weight = p.lambda_l if opts.variant == "paper" else 2.0 * p.lambda_l
    return weight * float(value[0])


@lru_cache(maxsize=4096)
def exponents(params: NetworkParams, opts: AnalyticOptions = AnalyticOptions()) -> Exponents:
    """(A, S1, S2) for a parameter set; cached since every cov_* shares them."""
    validate(params)
    th = derived_thresholds(params)
    direct = _feed_exponent(th.c0, params)
    return Exponents(
        float(direct),
        _on_line_exponent(params, th, opts),
        _off_line_exponent(params, th, opts),
    )


def _coverage(exponent):
    out = -math.expm1(-exponent)
    if not 0.0 <= out <= 1.0:
        raise QuadratureError(f"coverage {out!r} outside [0, 1]")
    return out


def cov_no_ris(params: NetworkParams, opts: AnalyticOptions = AnalyticOptions()):
    validate(params)
    th = derived_thresholds(params)
    return _coverage(float(_feed_exponent(th.c0, params)))


def cov_vehicle(params: NetworkParams, opts: AnalyticOptions = AnalyticOptions()):
    e = exponents(params, opts)
    return _coverage(e.direct + e.on_line + e.off_line)


def cov_handset(params: NetworkParams, opts: AnalyticOptions = AnalyticOptions()):
    e = exponents(params, opts)
    return _coverage(e.direct + e.off_line)


def cov_total(params: NetworkParams, opts: AnalyticOptions = AnalyticOptions()):
    w1 = params.vehicle_weight
    out = 0.0
    if w1 > 0:
        out += w1 * cov_vehicle(params, opts)
    if w1 < 1:
        out += (1.0 - w1) * cov_handset(params, opts)
    return out


def outage_ratio(params: NetworkParams, opts: AnalyticOptions = AnalyticOptions()):
    """Vehicle outage over handset outage, exp(-S1)."""
    e = exponents(params, opts)
    if cov_handset(params, opts) == 1.0:
        raise ValueError("handset coverage rounds to 1; outage ratio undefined")
    return math.exp(-e.on_line)


def outage_gain(params: NetworkParams, opts: AnalyticOptions = AnalyticOptions()):
    """No-RIS outage divided by the population outage with RISs."""
    e = exponents(params, opts)
    w1 = params.vehicle_weight
    # e^{S2} / (w1 e^{-S1} + w2), kept finite as long as the result is
    log_gain = e.off_line - math.log(w1 * math.exp(-e.on_line) + (1.0 - w1))
    return math.exp(log_gain) if log_gain < 709.0 else math.inf


def outage_gain_from_coverage(params: NetworkParams, opts: AnalyticOptions = AnalyticOptions()):
    """Same gain from the coverage probabilities, (1 - P_no_ris) / (1 - P_total)."""
    if cov_total(params, opts) == 1.0:
        return math.inf
    return (1.0 - cov_no_ris(params, opts)) / (1.0 - cov_total(params, opts))


def evaluate(params: NetworkParams, opts: AnalyticOptions = AnalyticOptions()) -> dict:
    """Every analytic quantity of one variant, as a flat dict."""
    return {
        "cov_no_ris": cov_no_ris(params, opts),
        "cov_vehicle": cov_vehicle(params, opts),
        "cov_handset": cov_handset(params, opts),
        "cov_total": cov_total(params, opts),
        "outage_ratio": outage_ratio(params, opts),
        "gain": outage_gain(params, opts),
    }
