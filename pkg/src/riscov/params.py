"""Model parameters, unit conversions and the derived threshold radii."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

SPEED_OF_LIGHT = 299_792_458.0  # m/s

PER_KM2 = 1e-6  # 1/km^2 -> 1/m^2
PER_KM = 1e-3  # 1/km -> 1/m


class ParameterError(ValueError):
    """Raised when a parameter set violates one or more model invariants."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


def to_linear(db):
    return 10.0 ** (db / 10.0)


def to_db(x):
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class LinkBudget:
    """Transmit-side constants. Powers in dBm, gains/losses in dB.

    ``l_p_db`` and ``l_r_db`` default to 0 dB. With the Fig. 4 budget
    (23 dBm, 5/5 dB, 6 GHz, 10 MHz, 6 dB) a combined loss of about
    9.94 dB is what brings gamma down to 83 dB.
    """

    p_t_dbm: float = 23.0
    g_t_db: float = 5.0
    g_r_db: float = 5.0
    f_c_hz: float = 6e9
    l_p_db: float = 0.0
    l_r_db: float = 0.0
    n0_dbm_per_hz: float = -174.0
    bw_hz: float = 10e6
    nf_db: float = 6.0

    @property
    def wavelength(self):
        return SPEED_OF_LIGHT / self.f_c_hz

    def noise_floor_dbm(self):
        return self.n0_dbm_per_hz + 10.0 * math.log10(self.bw_hz) + self.nf_db


def gamma_from_budget(budget: LinkBudget) -> float:
    """Linear gain p_t G_t G_r (lambda_c/4)^2 / (L_p L_r N_0 B_W F)."""
    problems = []
    if not (budget.f_c_hz > 0 and math.isfinite(budget.f_c_hz)):
        problems.append("f_c must be positive")
    if not (budget.bw_hz > 0 and math.isfinite(budget.bw_hz)):
        problems.append("B_W must be positive")
    for name in ("p_t_dbm", "g_t_db", "g_r_db", "l_p_db", "l_r_db", "n0_dbm_per_hz", "nf_db"):
        if not math.isfinite(getattr(budget, name)):
            problems.append(f"{name} must be finite")
    if problems:
        raise ParameterError(problems)
    gamma_db = (
        budget.p_t_dbm
        + budget.g_t_db
        + budget.g_r_db
        + 20.0 * math.log10(budget.wavelength / 4.0)
        - budget.l_p_db
        - budget.l_r_db
        - budget.noise_floor_dbm()
    )
    gamma = to_linear(gamma_db)
    if not (math.isfinite(gamma) and gamma > 0):
        raise ParameterError([f"invalid budget: gamma = {gamma_db} dB is not representable"])
    return gamma


@dataclass(frozen=True)
class NetworkParams:
    """All model parameters in SI units (metres, linear ratios).

    Defaults are the experiment table of the model (lambda = 40/km^2,
    2 km of road per km^2, 4 RIS/km, 25 vehicles/km, 200 handsets/km^2,
    alpha = 2.4/3.7, eta = 48/36 m, gamma = 97 dB, tau = 0 dB, 64 elements).
    """

    lambda_bs: float = 40 * PER_KM2
    lambda_l: float = 2 * PER_KM
    mu: float = 4 * PER_KM
    nu: float = 25 * PER_KM
    lambda_2: float = 200 * PER_KM2
    alpha_1: float = 2.4
    alpha_2: float = 3.7
    eta_1: float = 48.0
    eta_2: float = 36.0
    tau: float = 1.0
    gamma: float = field(default_factory=lambda: to_linear(97.0))
    n_r: int = 64

    def replace(self, **changes) -> "NetworkParams":
        return replace(self, **changes)

    @property
    def vehicle_weight(self):
        """Share of vehicle users in the total user density."""
        total = self.lambda_l * self.nu + self.lambda_2
        if total <= 0:
            raise ParameterError(["vehicle and handset densities are both zero"])
        return self.lambda_l * self.nu / total


DENSITY_FIELDS = ("lambda_bs", "lambda_l", "mu", "nu", "lambda_2")
PARAM_FIELDS = tuple(f.name for f in fields(NetworkParams))


def problems(params: NetworkParams) -> list[str]:
    """Names of every violated invariant, empty when the set is valid."""
    out = []
    values = [getattr(params, name) for name in PARAM_FIELDS]
    if not all(isinstance(v, (int, float)) and math.isfinite(v) for v in values):
        out.append("all parameters must be finite numbers")
        return out
    if any(getattr(params, name) < 0 for name in DENSITY_FIELDS):
        out.append("densities must be nonnegative")
    # the road exponent only enters one-dimensional integrals, so 2 itself is fine
    if not params.alpha_1 >= 2:
        out.append("alpha_1 must be at least 2")
    if not params.alpha_2 > 2:
        out.append("alpha_2 must exceed 2")
    if not params.eta_1 > 0:
        out.append("eta_1 must be positive")
    if not params.eta_2 > 0:
        out.append("eta_2 must be positive")
    if not params.tau > 0:
        out.append("tau must be positive")
    if not params.gamma > 0:
        out.append("gamma must be positive")
    if params.n_r < 1 or int(params.n_r) != params.n_r:
        out.append("n_r must be an integer >= 1")
    return out


def validate(params: NetworkParams) -> NetworkParams:
    found = problems(params)
    if found:
        raise ParameterError(found)
    return params


@dataclass(frozen=True)
class Thresholds:
    c0: float  # farthest BS that can serve directly
    c1: float  # farthest on-road RIS that can serve a vehicle
    c2: float  # farthest planar RIS; also the feed-radius scale
    rho: float  # alpha_1 / alpha_2


def derived_thresholds(params: NetworkParams) -> Thresholds:
    validate(params)
    ratio = params.gamma / params.tau
    boosted = ratio * params.n_r**2
    return Thresholds(
        c0=ratio ** (1.0 / params.alpha_2),
        c1=boosted ** (1.0 / params.alpha_1),
        c2=boosted ** (1.0 / params.alpha_2),
        rho=params.alpha_1 / params.alpha_2,
    )
