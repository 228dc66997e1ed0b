import json
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reverse_sobolev import functional as fn
from reverse_sobolev.gegenbauer import gegenbauer_norm_sq
from reverse_sobolev.serialization import INDETERMINATE, dumps
from reverse_sobolev.special import Regime, SpectralParams, sharp_constant
from reverse_sobolev.verification import smooth_positive_profile, vanishing_family
from reverse_sobolev.zonal import (
    ConformalDilation,
    conformal_dilate,
    equality_profile,
    make_zonal,
    vanishing_profile,
)

@pytest.fixture(autouse=True, scope="module")
def _mp_precision():
    with mpmath.workdps(30):
        yield


def mp_alpha(n, s, ell):
    return mpmath.gamma(ell + mpmath.mpf(n) / 2 + s) * mpmath.rgamma(ell + mpmath.mpf(n) / 2 - s)


def one(n):
    return make_zonal(n, lambda t: np.ones_like(t))


def test_circle_constant():
    p = SpectralParams(1, 1.0)
    assert fn.quad_form(one(1), p) == pytest.approx(-math.pi / 2, rel=1e-14)
    rep = fn.quotient(one(1), p)
    assert rep.quotient == pytest.approx(-math.pi**2, rel=1e-12)
    assert rep.integral == pytest.approx(2 * math.pi, rel=1e-14)
    assert not rep.divergence_certified


@pytest.mark.parametrize("n,s", [(2, 1.4), (3, 2.9), (4, 3.7), (5, 2.6), (2, 8.3)])
def test_quotient_of_constant(n, s):
    p = SpectralParams(n, s)
    assert float(fn.quotient(one(n), p).quotient) == pytest.approx(sharp_constant(p), rel=1e-12)


def test_t_squared_two_term_oracle():
    # alpha(0) c0^2 N0 + alpha(2) c1^2 N2 on S^2 with c = (1/3, 2/3)
    want = 2 * mpmath.pi * (mp_alpha(2, 3.5, 0) * mpmath.mpf(1) / 9 * 2 + mp_alpha(2, 3.5, 2) * mpmath.mpf(4) / 9 * mpmath.mpf(2) / 5)
    got = fn.quad_form(make_zonal(2, lambda t: t**2), SpectralParams(2, 3.5))
    assert got == pytest.approx(float(want), rel=1e-12)
    assert got == pytest.approx(-107.894, abs=1e-3)


def test_insufficient_band_limit():
    u = make_zonal(2, lambda t: np.exp(5 * t), L_max=4)
    with pytest.raises(ValueError, match="insufficient band limit"):
        fn.quad_form(u, SpectralParams(2, 1.4))


@pytest.mark.parametrize("c", [0.01, 3.0, 250.0])
def test_quotient_scale_invariance(c):
    p = SpectralParams(3, 2.3)
    u = make_zonal(3, smooth_positive_profile(np.random.default_rng(1)))
    q0 = float(fn.quotient(u, p).quotient)
    assert float(fn.quotient(u.scaled(c), p).quotient) == pytest.approx(q0, rel=1e-12)


@pytest.mark.parametrize("n,s", [(2, 1.4), (3, 2.2), (1, 1.7), (4, 5.3), (2, 3.5)])
@pytest.mark.parametrize("seed", [0, 1])
def test_conformal_invariance(n, s, seed):
    p = SpectralParams(n, s)
    u = make_zonal(n, smooth_positive_profile(np.random.default_rng(seed)))
    a0, q0 = fn.quad_form(u, p), float(fn.quotient(u, p).quotient)
    for lam in (0.5, 2.0):
        v = conformal_dilate(u, ConformalDilation(lam), p)
        assert abs(fn.quad_form(v, p) - a0) <= 1e-6 * (1 + abs(a0))
        assert abs(float(fn.quotient(v, p).quotient) - q0) <= 1e-6 * (1 + abs(q0))


@pytest.mark.parametrize("n,s", [(2, 1.4), (2, 2.6), (3, 1.8), (3, 3.3), (1, 1.2)])
@pytest.mark.parametrize("zeta", [0.0, 0.5, -0.7])
def test_equality_family(n, s, zeta):
    p = SpectralParams(n, s)
    q = fn.quotient(equality_profile(p, zeta, 2.0), p).quotient
    assert float(q) == pytest.approx(sharp_constant(p), rel=1e-9)


def test_vanishing_profile_is_indeterminate():
    p = SpectralParams(2, 1.4)
    rep = fn.quotient(vanishing_profile(p, 1, 4000), p)
    assert rep.divergence_certified and rep.integral == math.inf
    assert rep.quotient is INDETERMINATE
    assert rep.to_dict()["quotient"] == "indeterminate"


def test_positive_form_with_infinite_integral():
    p = SpectralParams(2, 1.4)
    rep = fn.quotient(vanishing_profile(p, 2, 4000), p)
    assert rep.a_value > 0 and rep.quotient == math.inf


@pytest.mark.parametrize("n,s", [(2, 1.4), (3, 1.8), (2, 2.6), (3, 3.3), (1, 0.8), (4, 3.5)])
def test_positivity_family(n, s):
    p = SpectralParams(n, s)
    for u in vanishing_family(p, 20, seed=7, L_max=2000):
        assert fn.quad_form(u, p) >= -1e-7 * fn.hs_proxy_norm_sq(u, p)


@pytest.mark.parametrize("n,s", [(2, 1.4), (3, 2.2), (3, 1.8), (2, 2.6), (1, 1.3), (5, 4.4)])
def test_vanishing_profile_form_is_zero(n, s):
    p = SpectralParams(n, s)
    d = fn.quad_form_details(vanishing_profile(p, 1, 4000), p)
    assert abs(d.extrapolated) <= fn.ZERO_FORM_TOL * d.scale


def test_report_serialization():
    rep = fn.instability_even(SpectralParams(2, 3.5), 1)
    d = json.loads(dumps(rep.to_dict()))
    assert set(d) == {"a_value", "integral", "quotient", "truncation_residual", "divergence_certified"}
    assert d["integral"] == "+inf" and d["quotient"] == "-inf"
    back = fn.FunctionalReport.from_dict(d)
    assert back.a_value == rep.a_value and back.quotient == -math.inf


@pytest.mark.parametrize("n,s", [(2, 3.5), (2, 1.4), (3, 4.2), (5, 9.9), (1, 1.3)])
def test_second_variation_closed_forms(n, s):
    p = SpectralParams(n, s)
    h2 = float(2 * s * mpmath.gamma(1 + mpmath.mpf(n) / 2 + s) * mpmath.rgamma(2 + mpmath.mpf(n) / 2 - s))
    h3 = float(2 * s * (n + 3) * mpmath.gamma(1 + mpmath.mpf(n) / 2 + s) * mpmath.rgamma(3 + mpmath.mpf(n) / 2 - s))
    assert fn.second_variation(p, 2) == pytest.approx(h2, rel=1e-10)
    assert fn.second_variation(p, 3) == pytest.approx(h3, rel=1e-10)


def test_second_variation_example():
    assert fn.second_variation(SpectralParams(2, 3.5), 2) == pytest.approx(-103.359375, rel=1e-12)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 8), st.floats(0.01, 9.99))
def test_second_variation_signs(n, excess):
    if abs(excess - round(excess)) < 1e-6:
        return
    p = SpectralParams(n, n / 2 + excess)
    m = math.floor(excess)
    h2, h3 = fn.second_variation(p, 2), fn.second_variation(p, 3)
    assert (h2 < 0) == (m >= 2 and m % 2 == 0)
    assert (h3 < 0) == (m >= 3 and m % 2 == 1)
    if p.regime is Regime.ATTAINED_CONFORMAL:
        assert h2 >= 0 and h3 >= 0


@pytest.mark.parametrize("n,s", [(2, 1.5), (1, 1.3), (4, 3.7), (3, 2.5), (2, 2.0), (5, 7.1)])
def test_funk_hecke(n, s):
    p = SpectralParams(n, s)
    for ell in range(6):
        assert fn.funk_hecke_residual(p, ell) < 1e-8


def test_riesz_eigenvalue_degree_zero_on_s2():
    # int |w - w'|^{2s-n} over S^2 at 2s - n = 1: 16 pi / 3
    assert fn.riesz_eigenvalue(SpectralParams(2, 1.5), 0) == pytest.approx(16 * math.pi / 3, rel=1e-13)


def test_instability_even_example():
    p = SpectralParams(2, 3.5)
    rep = fn.instability_even(p, 1)
    assert rep.a_value < 0 and rep.divergence_certified
    assert rep.integral == math.inf and rep.quotient == -math.inf
    assert rep.a_value == pytest.approx(fn.even_spectral_sum(p, 1), rel=1e-10)
    assert rep.a_value == pytest.approx(-107.894, abs=1e-3)


@pytest.mark.parametrize("n,s,K", [(3, 4.2, 1), (2, 5.6, 2), (4, 6.6, 2), (6, 5.4, 1)])
def test_instability_even_other_points(n, s, K):
    p = SpectralParams(n, s)
    rep = fn.instability_even(p, K)
    assert rep.a_value < 0 and rep.quotient == -math.inf
    assert rep.a_value == pytest.approx(fn.even_spectral_sum(p, K), rel=1e-10)
    u = fn.even_test_function(n, K)
    odd = np.asarray(u.coeffs[1::2])
    assert np.all(odd == 0) and np.all(u.coeffs[2 * K + 1:] == 0)


@pytest.mark.parametrize("n,s,K", [(2, 4.5, 1), (3, 5.0, 1), (2, 6.3, 2), (6, 8.1, 2)])
def test_instability_odd(n, s, K):
    p = SpectralParams(n, s)
    rep = fn.instability_odd(p, K)
    assert rep.a_value < 0 and rep.divergence_certified and rep.quotient == -math.inf
    assert all(b < 0 for b in fn.odd_bracket_terms(p, K))
    u = fn.odd_test_function(n, K)
    assert np.min(u.evaluate(np.linspace(-1, 1, 401))) >= 0


def test_odd_exact_spectral_sum():
    # u = t^2 - t^3 on S^2 with c = (1/3, 2/3), d = (3/5, 2/5)
    n, s = 2, 4.5
    terms = [(0, 1 / 3), (2, 2 / 3), (1, -3 / 5), (3, -2 / 5)]
    want = 2 * mpmath.pi * sum(mp_alpha(n, s, ell) * c**2 * gegenbauer_norm_sq(n, ell) for ell, c in terms)
    assert fn.instability_odd(SpectralParams(n, s), 1).a_value == pytest.approx(float(want), rel=1e-12)


def test_case_mismatch():
    with pytest.raises(ValueError, match="K incompatible"):
        fn.instability_even(SpectralParams(2, 3.5), 2)
    with pytest.raises(ValueError, match="K incompatible"):
        fn.instability_odd(SpectralParams(2, 3.5), 1)


def test_ineq2_examples():
    assert fn.ineq2_fraction(2, 1, 0) == Fraction(81, 50)
    assert fn.ineq2_fraction(2, 1, 1) == Fraction(36, 35)
    assert fn.ineq2_lhs(2, 1, 0) == pytest.approx(1.62)
    assert fn.ineq2_fraction(5, 3, 2) >= 1


def test_ineq2_small():
    rep = fn.ineq2_verify(2, 1)
    assert rep.passed and rep.minimum == Fraction(36, 35)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 60), st.integers(1, 60), st.data())
def test_ineq2_random(n, K, data):
    k = data.draw(st.integers(0, K))
    assert fn.ineq2_fraction(n, K, k) > 1
    if k <= K - 1:
        assert fn.monotone_factor(n + 1, K, k) >= fn.monotone_factor(n, K, k)
