import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from heckeverify import arith, hecke
from heckeverify.hecke import (MonomialSum, REGISTRY_EXAMPLES, SystemError_, get_system,
                               residual_p, residual_q, residual_r)

SMALL = 2000


def coeffs(ms):
    return {float(e): float(c) for c, e in ms}


def assert_same_sum(ms, expected, rel=1e-14):
    got = coeffs(ms)
    assert sorted(got) == sorted(expected), (got, expected)
    for e, c in expected.items():
        assert got[e] == pytest.approx(c, rel=rel, abs=0), e


# ----------------------------------------------------------- monomial sums

def test_monomial_sum_canonical_form():
    ms = MonomialSum.build([(2, 1), (1, 0.5), (-2, 1), (3, Fraction(1, 2))])
    assert ms.terms == ((4, Fraction(1, 2)),)
    assert ms(4.0) == pytest.approx(8.0)
    assert len(MonomialSum.build([])) == 0
    assert MonomialSum()(3.0) == 0
    assert str(MonomialSum()) == "0"


# ----------------------------------------------------------- Q_0 explicit forms

@pytest.mark.parametrize("k", [2, 3, 4, 5, 8, 12])
def test_q0_sum_of_squares(k):
    q = residual_q(hecke.system_rk(k, SMALL), 0)
    expected = {0.0: -1.0, k / 2: (2 * math.pi) ** (k / 2) / math.gamma(1 + k / 2)}
    assert_same_sum(q, expected)


def test_q0_sum_of_squares_low_cases():
    assert_same_sum(residual_q(hecke.system_rk(2, SMALL)), {0.0: -1.0, 1.0: 2 * math.pi})
    assert_same_sum(residual_q(hecke.system_rk(4, SMALL)), {0.0: -1.0, 2.0: 2 * math.pi ** 2})


@pytest.mark.parametrize("k", [1, 3, 5, 7, 11])
def test_q0_divisor_sums(k):
    b = float(arith.bernoulli(k + 1))
    expected = {
        0.0: b / (2 * (k + 1)),
        k + 1.0: (2 * math.pi) ** (k + 1) * (-1) ** ((k - 1) // 2) * b
        / (2 * (k + 1) * math.gamma(k + 2)),
    }
    if k == 1:
        expected[1.0] = -0.5
    assert_same_sum(residual_q(hecke.system_sigma(k, SMALL)), expected)


def test_q0_divisor_sums_k1_values():
    q = residual_q(hecke.system_sigma(1, SMALL))
    assert_same_sum(q, {0.0: 1 / 24, 1.0: -0.5, 2.0: math.pi ** 2 / 12})


def test_q0_zeta():
    q = residual_q(hecke.system_zeta(SMALL))
    assert_same_sum(q, {0.0: -0.5, 0.5: math.sqrt(2)})
    assert q(2) == pytest.approx(1.5, rel=1e-15)


@pytest.mark.parametrize("sid", ["tau", "char:4:1", "char:3:1", "char:5:2", "char:5:1", "char:8:3"])
def test_q0_vanishes_for_entire_series(sid):
    assert len(residual_q(get_system(sid, SMALL))) == 0
    assert len(residual_p(get_system(sid, SMALL))) == 0


@pytest.mark.parametrize("D", [-3, -4, -7, -8, -11])
def test_q0_dedekind(D):
    h, w = arith.CLASS_DATA[D]
    q = residual_q(hecke.system_dedekind(D, table_size=SMALL))
    assert_same_sum(q, {0.0: -h / w, 1.0: 2 * math.pi * h / w})


def test_q0_dedekind_gaussian_field():
    q = residual_q(hecke.system_dedekind(-4, table_size=SMALL))
    assert_same_sum(q, {0.0: -0.25, 1.0: math.pi / 2})
    assert hecke.system_dedekind(-3, table_size=SMALL).phi_at_zero == Fraction(-1, 6)


@pytest.mark.parametrize("sid", REGISTRY_EXAMPLES)
def test_q_rho_shifts_exponents(sid):
    system = get_system(sid, SMALL)
    q0, q1 = residual_q(system, 0), residual_q(system, 1)
    assert len(q0) == len(q1)
    for (c0, e0), (c1, e1) in zip(q0, q1):
        assert e1 == e0 + 1
        assert c1 == pytest.approx(c0 / (float(e0) + 1), rel=1e-14)


# ----------------------------------------------------------- P and R

def test_p_examples():
    assert_same_sum(residual_p(hecke.system_rk(2, SMALL)), {0.0: -1.0, -1.0: 2 * math.pi})
    assert_same_sum(residual_p(hecke.system_zeta(SMALL)),
                    {0.0: -0.5, -0.5: math.sqrt(math.pi / 2)})
    assert_same_sum(residual_p(hecke.system_dedekind(-4, table_size=SMALL)),
                    {0.0: -0.25, -1.0: math.pi / 2})


@pytest.mark.parametrize("x", [0.5, 2.0, 7.0])
def test_p_matches_theta_transformation(x):
    # theta3(e^(-x/2))^2 = (2 pi/x) theta3(e^(-2 pi^2/x))^2
    lhs = mpmath.jtheta(3, 0, mpmath.exp(-x / 2)) ** 2 - 1
    dual = (2 * math.pi / x) * (mpmath.jtheta(3, 0, mpmath.exp(-2 * math.pi ** 2 / x)) ** 2 - 1)
    p = residual_p(hecke.system_rk(2, SMALL))
    assert float(lhs - dual) == pytest.approx(p(x), rel=1e-13)


def test_p_zeta_matches_classical_theta():
    # sum_{n>=1} e^(-n^2 x/2) at x=1 versus the residual part plus its dual series
    x = 1.0
    lhs = mpmath.nsum(lambda n: mpmath.exp(-n * n * x / 2), [1, mpmath.inf])
    dual = math.sqrt(2 * math.pi / x) * mpmath.nsum(
        lambda n: mpmath.exp(-2 * math.pi ** 2 * n * n / x), [1, mpmath.inf])
    p = residual_p(hecke.system_zeta(SMALL))
    assert float(lhs - dual) == pytest.approx(p(x), rel=1e-13)


def test_r_examples():
    for rho in (0, 1, 2):
        assert len(residual_r(hecke.system_tau(SMALL), rho)) == 0
    r = residual_r(hecke.system_zeta(SMALL), 0)
    assert sorted(float(e) for _, e in r) == [-2.0, -1.0]
    with pytest.raises(SystemError_):
        residual_r(hecke.system_zeta(SMALL), 3)


def test_r_sigma1_constant_terms():
    # rho = 0: 1/(24 s) - 1/s^2 + pi^2/(3 s^3)... from residues at 0, 1 and 2
    r = residual_r(hecke.system_sigma(1, SMALL), 0)
    expected = {-1.0: 1 / 24, -3.0: -0.5 * math.gamma(3) / math.gamma(2),
                -5.0: math.pi ** 2 / 6 * math.gamma(5) / math.gamma(3)}
    assert_same_sum(r, expected, rel=1e-13)


# ----------------------------------------------------------- system data

def test_system_constants():
    assert hecke.system_tau(SMALL).delta == 12
    assert hecke.system_zeta(SMALL).phi_at_zero == Fraction(-1, 2)
    c4 = get_system("char:4:1", SMALL)
    assert c4.delta == Fraction(3, 2)
    assert float(c4.lam.values([1])[0]) == pytest.approx(1 / 8, rel=1e-15)
    assert get_system("char:5:2", SMALL).delta == Fraction(1, 2)
    assert get_system("rk:3", SMALL).delta == Fraction(3, 2)


@pytest.mark.parametrize("sid", REGISTRY_EXAMPLES)
def test_exponents_strictly_increasing(sid):
    system = get_system(sid, SMALL)
    ns = np.arange(1, SMALL + 1)
    for seq in (system.lam, system.mu):
        v = seq.values(ns)
        assert v[0] > 0 and np.all(np.diff(v) > 0)


@pytest.mark.parametrize("sid", REGISTRY_EXAMPLES)
def test_growth_bound_holds(sid):
    system = get_system(sid, SMALL)
    c, theta = system.growth
    ns = np.arange(1, SMALL + 1)
    for tab, seq in ((system.a, system.lam), (system.b, system.mu)):
        assert np.all(np.abs(tab.numeric(1, SMALL)) <= c * seq.values(ns) ** theta * (1 + 1e-12))


def test_growth_violation_is_rejected():
    good = hecke.system_tau(SMALL)
    with pytest.raises(SystemError_, match="growth"):
        hecke.HeckeSystem(name="bad", delta=good.delta, a=good.a, lam=good.lam, b=good.b,
                          mu=good.mu, sigma_a_star=good.sigma_a_star, phi_at_zero=0,
                          poles=(), growth=(1.0, 5.0))


def test_dual_residues_follow_functional_equation():
    # psi = phi for self-dual systems, so the dual residues coincide with the direct ones
    for sid in ("rk:2", "rk:4", "zeta", "dedekind:-4"):
        system = get_system(sid, SMALL)
        direct = dict((float(z), float(r)) for z, r in system.residues)
        dual = dict((float(z), float(r)) for z, r in system.dual_residues)
        assert sorted(direct) == sorted(dual)
        for z in direct:
            assert dual[z] == pytest.approx(direct[z], rel=1e-13)


def test_sigma_dual_residues_carry_sign():
    for k in (1, 3):
        system = get_system(f"sigma:{k}", SMALL)
        sign = system.info["sign"]
        direct = dict((float(z), float(r)) for z, r in system.residues)
        for z, r in system.dual_residues:
            assert float(r) == pytest.approx(sign * direct[float(z)], rel=1e-13)


# ----------------------------------------------------------- registry

def test_registry_cache_and_sizes():
    a = get_system("rk:2", SMALL)
    assert get_system(" rk:2 ", SMALL) is a
    assert get_system("rk:2", SMALL + 1) is not a
    assert a.table_size == SMALL


@pytest.mark.parametrize("sid", ["nope", "rk", "rk:1", "rk:x", "sigma:2", "char:5:0",
                                 "char:9:1", "dedekind:-15", "dedekind:-12", "tau:1"])
def test_registry_errors(sid):
    with pytest.raises(SystemError_):
        get_system(sid, SMALL)


def test_character_system_requires_primitive():
    with pytest.raises(SystemError_):
        hecke.system_character(arith.builtin_character(8, 1), SMALL)


def test_custom_dedekind_constants():
    system = hecke.system_dedekind(-15, h=2, w=2, table_size=SMALL)
    assert system.phi_at_zero == -1
    with pytest.raises(SystemError_):
        hecke.system_dedekind(-15, h=2, table_size=SMALL)
