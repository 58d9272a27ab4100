import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import gamma, gammainc

from riscov.quadrature import NODES, WG7, WK15, QuadratureError, integrate, integrate_batch


def test_rule_weights():
    assert WK15.sum() == pytest.approx(2.0, abs=1e-14)
    assert WG7.sum() == pytest.approx(2.0, abs=1e-14)
    assert np.count_nonzero(WG7) == 7


@pytest.mark.parametrize("degree", range(0, 23))
def test_kronrod_exact_for_polynomials(degree):
    exact = (1 - (-1) ** (degree + 1)) / (degree + 1)
    assert WK15 @ NODES**degree == pytest.approx(exact, abs=1e-14)


@pytest.mark.parametrize("degree", range(0, 14))
def test_gauss_exact_for_polynomials(degree):
    exact = (1 - (-1) ** (degree + 1)) / (degree + 1)
    assert WG7 @ NODES**degree == pytest.approx(exact, abs=1e-14)


CASES = [
    (np.sin, 0.0, np.pi),
    (lambda x: np.exp(-x / 48.0), 0.0, 3.5e5),
    (lambda x: np.sqrt(np.abs(x)), 0.0, 1.0),
    (lambda x: 1.0 / (1.0 + x * x), -50.0, 50.0),
    (lambda x: np.abs(x - 0.3), 0.0, 1.0),
]


@pytest.mark.parametrize("f, a, b", CASES)
def test_against_scipy(f, a, b):
    value, err = integrate(f, a, b, rel_tol=1e-10)
    ref = quad(f, a, b, epsabs=1e-15, epsrel=1e-13, limit=1000)[0]
    assert value == pytest.approx(ref, rel=1e-9)
    assert err <= 1e-10 * abs(value) * 1.01


@given(eta=st.floats(1, 500), upper=st.floats(0.1, 1e5), k=st.floats(0.5, 3))
def test_exponential_family(eta, upper, k):
    value, _ = integrate(lambda x: x**k * np.exp(-x / eta), 0.0, upper, rel_tol=1e-10, abs_tol=1e-300)
    # lower incomplete gamma: int_0^U x^k e^{-x/eta} dx
    ref = eta ** (k + 1) * gamma(k + 1) * gammainc(k + 1, upper / eta)
    assert value == pytest.approx(ref, rel=1e-8)


def test_batch_matches_individual():
    a = np.array([0.0, 1.0, -2.0, 5.0])
    b = np.array([1.0, 3.0, 2.0, 5.0])
    scale = np.array([1.0, 2.0, 3.0, 4.0])
    vals, _ = integrate_batch(lambda x, o: np.cos(scale[o] * x), a, b, rel_tol=1e-12)
    expected = (np.sin(scale * b) - np.sin(scale * a)) / scale
    np.testing.assert_allclose(vals, expected, rtol=1e-11, atol=1e-15)
    assert vals[3] == 0.0


def test_reversed_limits():
    value, _ = integrate(lambda x: x * x, 2.0, 0.0)
    assert value == pytest.approx(-8 / 3, rel=1e-13)


def test_breakpoints_used():
    f = lambda x: np.where(x < 1.0, 0.0, 1.0)  # noqa: E731
    value, _ = integrate(f, 0.0, 3.0, points=[1.0])
    assert value == pytest.approx(2.0, rel=1e-14)


def test_non_convergence_reports_achieved_error():
    with pytest.raises(QuadratureError) as info:
        integrate(lambda x: 1.0 / np.sqrt(np.abs(x - 0.3)), 0.0, 1.0, rel_tol=1e-14, max_rounds=8)
    assert info.value.achieved > info.value.requested


def test_shape_check():
    with pytest.raises(ValueError):
        integrate(lambda x: np.ones(3), 0.0, 1.0)
