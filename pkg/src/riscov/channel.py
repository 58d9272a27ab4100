"""LOS probabilities and SNR predicates for the two link classes."""

from __future__ import annotations

import enum
import math

import numpy as np

from .params import NetworkParams, Thresholds


class LinkClass(enum.Enum):
    LINEAR = "linear"  # on-road RIS -> vehicle on the same road
    PLANAR = "planar"  # every other link


def exponents(link_class: LinkClass, params: NetworkParams):
    """(path-loss exponent, blockage parameter) of a link class."""
    if link_class is LinkClass.LINEAR:
        return params.alpha_1, params.eta_1
    return params.alpha_2, params.eta_2


def los_probability(d, eta):
    return np.exp(-np.asarray(d, dtype=float) / eta)


def truncation_distance(eta: float, epsilon: float) -> float:
    """Distance beyond which a link is LOS with probability below ``epsilon``."""
    if not 0 < epsilon <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    return eta * math.log(1.0 / epsilon)


def direct_snr_ok(d, th: Thresholds):
    return np.asarray(d) < th.c0


def reflected_snr(d1, d2, link_class: LinkClass, params: NetworkParams):
    """Average SNR of a BS -> RIS -> user path, BS-RIS leg always planar."""
    d1 = np.asarray(d1, dtype=float)
    d2 = np.asarray(d2, dtype=float)
    if np.any(d1 <= 0) or np.any(d2 <= 0):
        raise ValueError("degenerate geometry: reflected link with zero length")
    alpha, _ = exponents(link_class, params)
    return params.gamma * params.n_r**2 * d1 ** (-params.alpha_2) * d2 ** (-alpha)


def reflected_snr_ok(d1, d2, link_class: LinkClass, params: NetworkParams):
    return reflected_snr(d1, d2, link_class, params) > params.tau


def feed_radius(d2, link_class: LinkClass, params: NetworkParams, th: Thresholds):
    """Largest BS-RIS distance that still clears the threshold for an RIS at ``d2``.

    Equal to c2 / d2^rho on the typical road and c2 / d2 off it.
    """
    alpha, _ = exponents(link_class, params)
    return th.c2 * np.asarray(d2, dtype=float) ** (-alpha / params.alpha_2)
