"""Shared parameter grids and an independent scipy evaluation of the formulas."""

import math

import numpy as np
from scipy.integrate import quad

from riscov.params import PER_KM, PER_KM2, NetworkParams, to_linear


def random_params(gen: np.random.Generator) -> NetworkParams:
    alpha_1 = gen.uniform(2.0, 3.2)
    return NetworkParams(
        lambda_bs=gen.uniform(5, 100) * PER_KM2,
        lambda_l=gen.uniform(0.5, 5) * PER_KM,
        mu=gen.uniform(0.5, 10) * PER_KM,
        nu=gen.uniform(5, 50) * PER_KM,
        lambda_2=gen.uniform(50, 500) * PER_KM2,
        alpha_1=alpha_1,
        alpha_2=gen.uniform(max(alpha_1 + 0.3, 3.0), 4.5),
        eta_1=gen.uniform(20, 100),
        eta_2=gen.uniform(20, 100),
        tau=to_linear(gen.uniform(-10, 10)),
        gamma=to_linear(gen.uniform(80, 110)),
        n_r=int(gen.choice([1, 4, 16, 64, 100, 256])),
    )


def parameter_grid(n=20, seed=2024):
    gen = np.random.default_rng(seed)
    return [random_params(gen) for _ in range(n)]


def _I(X, eta):
    if math.isinf(X):
        return eta**2
    x = X / eta
    return eta**2 * (1 - math.exp(-x) * (1 + x))


def scipy_exponents(p: NetworkParams, variant: str, eps=1e-12):
    """(A, S1, S2) by nested scipy quad; slow but written independently."""
    c0 = (p.gamma / p.tau) ** (1 / p.alpha_2)
    c1 = (p.gamma * p.n_r**2 / p.tau) ** (1 / p.alpha_1)
    c2 = (p.gamma * p.n_r**2 / p.tau) ** (1 / p.alpha_2)
    rho = p.alpha_1 / p.alpha_2
    lam, e1, e2, mu, ll = p.lambda_bs, p.eta_1, p.eta_2, p.mu, p.lambda_l
    A = 2 * math.pi * lam * _I(c0, e2)

    def z(radius):
        return 2 * math.pi * lam * _I(radius, e2)

    if variant == "paper":
        def h1(t):
            return 1 - (1 - math.exp(-t / e1)) * math.exp(-z(c2 / t**rho))

        def h2(d):
            return 1 - (1 - math.exp(-d / e2)) * math.exp(-z(c2 / d if d > 0 else math.inf))

        u_max, t_cap, k1, k2 = c2, math.inf, mu, ll
        upper1 = c1
    else:
        def h1(t):
            return math.exp(-t / e1) * (1 - math.exp(-z(c2 / t**rho)))

        def h2(d):
            return math.exp(-d / e2) * (1 - math.exp(-z(c2 / d if d > 0 else math.inf)))

        t2 = e2 * math.log(1 / eps)
        u_max, t_cap, k1, k2 = min(c2, t2), t2, 2 * mu, 2 * ll
        upper1 = min(c1, e1 * math.log(1 / eps))
    pts = [x for x in np.geomspace(e1, 1e6 * e1, 13) if x < upper1]
    S1 = k1 * quad(h1, 0, upper1, points=pts, limit=1000, epsabs=1e-14, epsrel=1e-11)[0] if mu > 0 else 0.0

    def middle(u):
        top = min(math.sqrt(max(c2 * c2 - u * u, 0.0)), t_cap)
        return quad(lambda t: h2(math.hypot(u, t)), 0, top, limit=400, epsabs=1e-14, epsrel=1e-11)[0]

    S2 = 0.0
    if mu > 0 and ll > 0:
        S2 = k2 * quad(lambda u: 1 - math.exp(-2 * mu * middle(u)), 0, u_max, limit=400,
                       epsabs=1e-13, epsrel=1e-10)[0]
    return A, S1, S2
