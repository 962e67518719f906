import itertools
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from heckeverify import specfun as sf


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


# ----------------------------------------------------------- gamma

def test_gamma_values():
    assert sf.gamma(1) == pytest.approx(1, rel=1e-15)
    assert sf.gamma(0.5) == pytest.approx(1.7724538509055160, rel=1e-15)
    assert sf.gamma(4) == pytest.approx(6, rel=1e-15)


def test_gamma_poles_and_overflow():
    for x in (0, -1, -7):
        with pytest.raises(sf.PoleError):
            sf.gamma(x)
    with pytest.raises(sf.RangeError):
        sf.gamma(200)


def test_log_gamma_values():
    assert sf.log_gamma(1) == 0
    assert abs(sf.log_gamma(2)) < 1e-16
    assert sf.log_gamma(11) == pytest.approx(math.log(3628800), rel=1e-15)
    with pytest.raises(sf.DomainError):
        sf.log_gamma(-1.5)


@given(st.floats(0.05, 60))
def test_log_gamma_matches_mpmath(x):
    assert sf.log_gamma(x) == pytest.approx(float(mpmath.loggamma(x)), rel=1e-13, abs=1e-14)


# ----------------------------------------------------------- K_nu

def test_bessel_k_examples():
    v = math.sqrt(math.pi / 4) * math.exp(-2)
    assert rel(sf.bessel_k(0.5, 2), v) < 1e-14
    assert sf.bessel_k(-0.5, 2) == sf.bessel_k(0.5, 2)
    lim = 2 ** 0.5 * sf.gamma(1.5)
    assert abs(sf.bessel_k(1.5, 0.01) * 0.01 ** 1.5 - lim) < 1e-3


def test_bessel_k_half_closed_form_on_log_grid():
    for x in np.logspace(math.log10(0.1), math.log10(500), 50):
        exact = math.sqrt(math.pi / (2 * x)) * math.exp(-x)
        assert rel(sf.bessel_k(0.5, x), exact) < 1e-13, x


def test_bessel_k_domain():
    with pytest.raises(sf.DomainError):
        sf.bessel_k(1, 0)
    with pytest.raises(sf.DomainError):
        sf.bessel_k(1, -2)
    with pytest.raises(sf.DomainError):
        sf.bessel_k(30, 1)


@settings(max_examples=200, deadline=None)
@given(st.floats(-20, 20), st.floats(1e-3, 600))
def test_bessel_k_matches_mpmath(nu, x):
    ref = mpmath.besselk(nu, x)
    if ref == 0 or ref < mpmath.mpf("1e-300"):
        return
    assert rel(sf.bessel_k(nu, x), float(ref)) < 1e-12


@given(st.floats(0, 20), st.floats(1e-2, 700))
def test_bessel_k_symmetric_in_order(nu, x):
    assert sf.bessel_k(nu, x) == sf.bessel_k(-nu, x)


def test_bessel_k_array_matches_scalar():
    xs = np.array([0.01, 0.3, 2.0, 40.0, 400.0])
    for nu in (0.0, 0.75, 3.5, 12.25):
        arr = sf.bessel_k_array(nu, xs)
        for x, v in zip(xs, arr):
            assert rel(v, sf.bessel_k(nu, x)) < 1e-14
        logs = sf.log_bessel_k_array(nu, xs)
        assert np.allclose(logs, np.log(arr), rtol=0, atol=1e-13)


def test_log_bessel_k_beyond_underflow():
    # K_0(2000) underflows binary64 but its log is still available
    v = sf.log_bessel_k_array(0.0, np.array([2000.0]))[0]
    ref = float(mpmath.log(mpmath.besselk(0, 2000)))
    assert v == pytest.approx(ref, rel=1e-13)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 4.99), st.floats(0.5, 50))
def test_bessel_k_derivative_recurrence(nu, x):
    # d/dx (x^nu K_nu(x)) = -x^nu K_{nu-1}(x)
    h = 1e-5 * x
    f = lambda t: t ** nu * sf.bessel_k(nu, t)
    deriv = (f(x + h) - f(x - h)) / (2 * h)
    target = -x ** nu * sf.bessel_k(nu - 1, x)
    assert rel(deriv, target) < 1e-6


@pytest.mark.parametrize("nu", [0.3, 1, 2.7])
def test_bessel_k_small_argument_limit(nu):
    lim = 2 ** (nu - 1) * sf.gamma(nu)
    xs = (1e-2, 1e-3, 1e-4)
    errs = [abs(x ** nu * sf.bessel_k(nu, x) - lim) / lim for x in xs]
    assert errs[0] > errs[1] > errs[2]
    for x, e in zip(xs, errs):
        ref = abs(x ** nu * mpmath.besselk(nu, x) - lim) / lim
        assert e == pytest.approx(float(ref), rel=1e-6)
    if nu >= 1:
        assert errs[2] < 1e-4


def test_bessel_k_small_argument_gap_for_small_order():
    # for 0 < nu < 1 the gap to the limit is (x/2)^(2 nu) Gamma(1-nu)/Gamma(1+nu) to leading order
    nu, x = 0.3, 1e-4
    lim = 2 ** (nu - 1) * sf.gamma(nu)
    gap = abs(x ** nu * sf.bessel_k(nu, x) - lim) / lim
    lead = (x / 2) ** (2 * nu) * sf.gamma(1 - nu) / sf.gamma(1 + nu)
    assert gap == pytest.approx(lead, rel=1e-2)


@given(st.floats(0, 10), st.floats(50, 700))
def test_bessel_k_large_argument_bound(nu, x):
    lead = math.sqrt(math.pi / (2 * x)) * math.exp(-x)
    ratio = sf.bessel_k(nu, x) / lead
    assert abs(ratio - 1) <= 2 * abs(4 * nu * nu - 1) / (8 * x) + 10 / x ** 2


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.25, 7.0, 13.5])
@pytest.mark.parametrize("x", [0.05, 1.0, 17.0, 150.0, 900.0])
def test_bessel_k_multiprecision(nu, x):
    with mpmath.workprec(200):
        ref = mpmath.besselk(mpmath.mpf(nu), mpmath.mpf(x))
        got = mpmath.mpf(str(sf.bessel_k_mp(nu, x, prec=160)))
        assert abs(got / ref - 1) < mpmath.mpf("1e-40")


def test_bessel_k_mp_many_matches_single():
    xs = [0.5, 3.0, 9.0, 9.5, 40.0]
    many = sf.bessel_k_mp_many(1.5, xs, prec=128)
    for x, v in zip(xs, many):
        assert abs(v / sf.bessel_k_mp(1.5, x, prec=128) - 1) < 1e-30


# ----------------------------------------------------------- J_nu

def test_bessel_j_examples():
    assert sf.bessel_j(0, 0) == 1
    assert abs(sf.bessel_j(0.5, math.pi)) < 1e-15
    assert abs(sf.bessel_j(1, 3.8317059702075123)) < 1e-10


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 20), st.floats(0, 3000))
def test_bessel_j_matches_reference(nu, x):
    ref = float(mpmath.besselj(nu, x))
    scale = max(abs(ref), 1 / math.sqrt(max(x, 1)) * 1e-3)
    assert abs(sf.bessel_j(nu, x) - ref) <= 1e-10 * scale + 1e-14


def test_bessel_j_array_matches_scalar():
    xs = np.linspace(0, 80, 41)
    arr = sf.bessel_j_array(2.5, xs)
    for x, v in zip(xs, arr):
        assert v == pytest.approx(sf.bessel_j(2.5, x), abs=1e-14)


def test_bessel_j_domain():
    with pytest.raises(sf.DomainError):
        sf.bessel_j(-0.5, 1)
    with pytest.raises(sf.DomainError):
        sf.bessel_j(1, -1)


# ----------------------------------------------------------- quadrature

def test_integrate_de_examples():
    r = sf.integrate_de(lambda x: np.exp(-x), 0, math.inf, 1e-12)
    assert abs(r.value - 1) < 1e-12 and r.error_estimate >= 0 and r.evaluations >= 1
    r = sf.integrate_de(lambda x: x ** -0.5, 0, 1, 1e-12)
    assert abs(r.value - 2) < 1e-10
    r = sf.integrate_de(lambda x: x * sf.bessel_k_array(0, x), 0, math.inf, 1e-12)
    assert abs(r.value - 1) < 1e-10


def test_integrate_de_algebraic_half_line():
    r = sf.integrate_de(lambda x: 1 / (1 + x * x), 0, math.inf, 1e-12, decay="alg")
    assert abs(r.value - math.pi / 2) < 1e-10


def test_integrate_de_reversed_and_empty():
    r = sf.integrate_de(np.cos, 1, 0, 1e-12)
    assert r.value == pytest.approx(-math.sin(1), abs=1e-12)
    assert sf.integrate_de(np.cos, 2, 2).value == 0


def test_integrate_de_nonfinite_integrand():
    with pytest.raises(sf.ConvergenceError):
        sf.integrate_de(lambda x: 1 / (x - 0.5) ** 2 * np.where(x > 0, np.inf, 1), 0, 1)


def test_integrate_de_stalls():
    with pytest.raises(sf.ConvergenceError):
        sf.integrate_de(lambda x: np.sin(1 / x) / x, 0, 1, 1e-14, max_level=3)


# ----------------------------------------------------------- integral lemmas

def _ws_quad(mu, nu, a, b, tol=1e-11):
    f = lambda t: t ** (mu + nu + 1) * sf.bessel_k_array(mu, a * t) * sf.bessel_j_array(nu, b * t)
    return sf.integrate_de(f, 0, math.inf, tol, scale=1 / a).value


def _km_quad(mu, nu, a, tol=1e-11):
    f = lambda x: np.exp(mu * np.log(x) + sf.log_bessel_k_array(nu, a * x))
    return sf.integrate_de(f, 0, math.inf, tol, scale=1 / a).value


def test_weber_schafheitlin_examples():
    assert sf.weber_schafheitlin(0, 0, 1, 1) == pytest.approx(0.5, rel=1e-15)
    assert sf.weber_schafheitlin(0, 1, 2, 1) == pytest.approx(0.08, rel=1e-15)
    assert abs(_ws_quad(0, 0, 1, 1) - 0.5) < 1e-8


def test_k_moment_examples():
    assert sf.k_moment(1, 0, 1) == pytest.approx(1, rel=1e-15)
    assert sf.k_moment(2, 1, 1) == pytest.approx(2, rel=1e-15)
    # int x^3 K_1 = 2^2 Gamma(5/2) Gamma(3/2) / 2 = 3 pi / 2
    assert sf.k_moment(3, 1, 1) == pytest.approx(3 * math.pi / 2, rel=1e-15)
    assert abs(_km_quad(3, 1, 1) - 3 * math.pi / 2) < 1e-8


def test_integral_lemma_domains():
    with pytest.raises(sf.DomainError):
        sf.weber_schafheitlin(2, 0, 1, 1)
    with pytest.raises(sf.DomainError):
        sf.weber_schafheitlin(0, 0, -1, 1)
    with pytest.raises(sf.DomainError):
        sf.k_moment(0, 1.5, 1)


WS_GRID = list(itertools.product([-0.5, 0.0, 0.75], [0.0, 0.5, 1.5], [0.5, 1.0, 2.0]))


@pytest.mark.parametrize("mu,nu,a", WS_GRID)
def test_weber_schafheitlin_vs_quadrature(mu, nu, a):
    for b in (0.5, 1.0, 2.0):
        assert abs(sf.weber_schafheitlin(mu, nu, a, b) - _ws_quad(mu, nu, a, b)) < 1e-7


KM_GRID = list(itertools.product([0.5, 1.0, 3.5], [0.0, 0.25, 1.25], [0.5, 1.0, 2.0]))


@pytest.mark.parametrize("mu,nu,a", KM_GRID)
def test_k_moment_vs_quadrature(mu, nu, a):
    assert abs(sf.k_moment(mu, nu, a) - _km_quad(mu, nu, a)) < 1e-7


def test_is_half_integer():
    assert sf.is_half_integer(0.5) and sf.is_half_integer(-3.5)
    assert not sf.is_half_integer(1.0) and not sf.is_half_integer(0.25)
