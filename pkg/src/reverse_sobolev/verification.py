"""Property battery behind ``reverse-sobolev verify``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import functional as fn
from .gegenbauer import (
    coeff_ratio,
    gegenbauer_norm_sq,
    gegenbauer_table,
    monomial_even_coeffs,
    monomial_odd_coeffs,
    norm_ratio,
    quadrature_rule,
)
from .special import (
    Regime,
    SpectralParams,
    gamma_ratio_value,
    instability_case,
    multiplier,
    sharp_constant,
    sphere_volume,
)
from .zonal import (
    ConformalDilation,
    conformal_dilate,
    make_zonal,
    power_profile,
    vanishing_profile,
)

POSITIVITY_TOL = 1e-7
CONFORMAL_TOL = 1e-6
VANISHING_L = 4000


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300) if b != 0 else abs(a)


def check_multipliers(p: SpectralParams, tol: float) -> list[CheckResult]:
    n, s = p.n, p.s
    worst_rec = worst_odd = 0.0
    for ell in range(20):
        a0, a1 = multiplier(p, ell), multiplier(p, ell + 1)
        if a0 != 0 and abs(ell + n / 2 - s) > 1e-9:
            worst_rec = max(worst_rec, _rel(a1, a0 * (ell + n / 2 + s) / (ell + n / 2 - s)))
    for k in range(10):
        if abs(2 * s - n - 4 * k) > 1e-9:
            want = -(2 * s + n + 4 * k) / (2 * s - n - 4 * k) * multiplier(p, 2 * k)
            got = multiplier(p, 2 * k + 1)
            worst_odd = max(worst_odd, abs(got - want) / max(abs(want), abs(got), 1e-300) if want or got else 0.0)
    S = sharp_constant(p)
    s_err = _rel(S, multiplier(p, 0) * sphere_volume(n) ** (2 * s / n))
    one = make_zonal(n, lambda t: np.ones_like(t))
    q1 = fn.quotient(one, p).quotient
    q_err = _rel(float(q1), S) if S != 0 else abs(float(q1))
    return [
        CheckResult("multiplier recurrence", worst_rec <= tol, f"max rel err {worst_rec:.2e}"),
        CheckResult("odd-even multiplier relation", worst_odd <= tol, f"max rel err {worst_odd:.2e}"),
        CheckResult("sharp constant = alpha(0)|S^n|^(2s/n)", s_err <= tol, f"rel err {s_err:.2e}"),
        CheckResult("quotient(1) = sharp constant", q_err <= max(tol, 1e-12), f"rel err {q_err:.2e}"),
    ]


def check_gegenbauer(p: SpectralParams, tol: float) -> list[CheckResult]:
    n = p.n
    rule = quadrature_rule(n, 24)
    tab = gegenbauer_table(n, 10, rule.nodes)
    gram = (tab * rule.weights) @ tab.T
    norms = np.array([gegenbauer_norm_sq(n, ell) for ell in range(11)])
    orth = float(np.max(np.abs(gram - np.diag(norms)) / np.sqrt(np.outer(norms, norms))))
    out = [CheckResult("Gegenbauer orthogonality", orth <= tol, f"max scaled err {orth:.2e}")]
    if n >= 2:
        worst = 0.0
        ratio_err = 0.0
        for K in range(6):
            even = monomial_even_coeffs(n, K)
            odd = monomial_odd_coeffs(n, K)
            proj_e = make_zonal(n, lambda t, K=K: t ** (2 * K), quadrature_rule(n, 2 * K + 8), 2 * K + 1)
            proj_o = make_zonal(n, lambda t, K=K: t ** (2 * K + 1), quadrature_rule(n, 2 * K + 8), 2 * K + 1)
            worst = max(worst, float(np.max(np.abs(proj_e.coeffs - even.dense(2 * K + 1)))),
                        float(np.max(np.abs(proj_o.coeffs - odd.dense(2 * K + 1)))))
            for k in range(K + 1):
                ratio_err = max(ratio_err, _rel(odd.values[k] / even.values[k], float(coeff_ratio(n, K, k))))
        for k in range(6):
            ratio_err = max(ratio_err, _rel(gegenbauer_norm_sq(n, 2 * k + 1) / gegenbauer_norm_sq(n, 2 * k),
                                            float(norm_ratio(n, k))))
        out.append(CheckResult("monomial coefficients vs projection", worst <= max(tol, 1e-10),
                               f"max abs err {worst:.2e}"))
        out.append(CheckResult("coefficient and norm ratios", ratio_err <= tol, f"max rel err {ratio_err:.2e}"))
    return out


def smooth_positive_profile(rng: np.random.Generator):
    c = rng.uniform(-0.4, 0.4, size=4)

    def f(t):
        t = np.asarray(t, dtype=float)
        return np.exp(c[0] * t + c[1] * t**2 + c[2] * t**3 + c[3] * np.sin(2 * t))

    return f


def check_conformal(p: SpectralParams, L_max: int, quad_order: int, seed: int) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    rule = quadrature_rule(p.n, quad_order)
    u = make_zonal(p.n, smooth_positive_profile(rng), rule, L_max)
    a0 = fn.quad_form(u, p)
    q0 = float(fn.quotient(u, p).quotient)
    worst_a = worst_q = 0.0
    for lam in (0.5, 2.0):
        v = conformal_dilate(u, ConformalDilation(lam), p)
        worst_a = max(worst_a, abs(fn.quad_form(v, p) - a0) / (1 + abs(a0)))
        worst_q = max(worst_q, abs(float(fn.quotient(v, p).quotient) - q0) / (1 + abs(q0)))
    return [
        CheckResult("conformal invariance of a_2s", worst_a <= CONFORMAL_TOL, f"max rel change {worst_a:.2e}"),
        CheckResult("conformal invariance of quotient", worst_q <= CONFORMAL_TOL, f"max rel change {worst_q:.2e}"),
    ]


def check_funk_hecke(p: SpectralParams, tol: float) -> list[CheckResult]:
    worst = max(fn.funk_hecke_residual(p, ell) for ell in range(6))
    return [CheckResult("Funk-Hecke residual, degrees 0..5", worst <= tol, f"max residual {worst:.2e}")]


def vanishing_family(p: SpectralParams, count: int, seed: int, L_max: int = VANISHING_L):
    """Profiles (1+t)^q P(t), P a random cubic, q above the H^s threshold s/2 - n/4.

    They vanish at t = -1, and for q > 1/2 their gradient at the south pole
    vanishes as well.
    """
    rng = np.random.default_rng(seed)
    delta = p.excess
    out = []
    for _ in range(count):
        q = delta / 2 + rng.uniform(0.5, 2.5)
        poly = np.polynomial.Polynomial(rng.standard_normal(rng.integers(1, 5)))
        # rewrite P(t) in powers of (1+t)
        shifted = poly(np.polynomial.Polynomial([-1.0, 1.0])).coef
        terms = [(float(c), q + k) for k, c in enumerate(shifted) if c != 0]
        out.append(power_profile(p.n, terms, L_max))
    return out


def check_positivity(p: SpectralParams, seed: int) -> list[CheckResult]:
    if not p.excess < 2:
        return []
    worst = math.inf
    for u in vanishing_family(p, 5, seed):
        a = fn.quad_form(u, p)
        worst = min(worst, a / fn.hs_proxy_norm_sq(u, p))
    out = [CheckResult("positivity under vanishing", worst >= -POSITIVITY_TOL, f"min normalized a {worst:.2e}")]
    d = fn.quad_form_details(vanishing_profile(p, 1, VANISHING_L), p)
    zero = abs(d.extrapolated) / d.scale if d.scale > 0 else 0.0
    out.append(CheckResult("a_2s of (1+t)^((2s-n)/2) vanishes", zero <= fn.ZERO_FORM_TOL,
                           f"|a|/sum|terms| {zero:.2e} after tail extrapolation"))
    return out


def check_ineq2() -> list[CheckResult]:
    rep = fn.ineq2_verify(40, 40)
    return [CheckResult("rational inequality n,K <= 40", rep.passed,
                        f"{rep.checked} cases, minimum {rep.minimum} at (n,K,k)={rep.argmin}")]


def check_second_variation(p: SpectralParams, tol: float) -> list[CheckResult]:
    n, s = p.n, p.s
    h2, h3 = fn.second_variation(p, 2), fn.second_variation(p, 3)
    f2 = 2 * s * gamma_ratio_value(1 + n / 2 + s, 2 + n / 2 - s)
    f3 = 2 * s * (n + 3) * gamma_ratio_value(1 + n / 2 + s, 3 + n / 2 - s)
    err = max(abs(h2 - f2) / max(abs(f2), 1e-300) if f2 else abs(h2),
              abs(h3 - f3) / max(abs(f3), 1e-300) if f3 else abs(h3))
    d = p.excess
    m = math.floor(d)
    frac = abs(d - round(d)) > 1e-9
    neg2 = frac and m >= 2 and m % 2 == 0
    neg3 = frac and m >= 3 and m % 2 == 1
    sign_ok = (h2 < 0) == neg2 and (h3 < 0) == neg3
    out = [
        CheckResult("second variation closed forms", err <= max(tol, 1e-10), f"max rel err {err:.2e}"),
        CheckResult("second variation signs", sign_ok, f"H(2)={h2:.6g}, H(3)={h3:.6g}"),
    ]
    if p.regime is Regime.ATTAINED_CONFORMAL:
        out.append(CheckResult("local minimality in attained regime", h2 >= 0 and h3 >= 0,
                               f"H(2)={h2:.6g}, H(3)={h3:.6g}"))
    return out


def check_instability(p: SpectralParams) -> list[CheckResult]:
    if p.regime is not Regime.NOT_ATTAINED or p.n < 2:
        return []
    parity, K = instability_case(p)
    rep = fn.instability_even(p, K) if parity == "even" else fn.instability_odd(p, K)
    ok = rep.a_value < 0 and rep.divergence_certified and rep.quotient == -math.inf
    out = [CheckResult(f"instability ({parity}, K={K})", ok,
                       f"a={rep.a_value:.6g}, integral divergent={rep.divergence_certified}")]
    if parity == "odd":
        br = fn.odd_bracket_terms(p, K)
        out.append(CheckResult("odd bracket terms negative", all(b < 0 for b in br),
                               "max bracket " + format(max(br), ".3e")))
    return out


def run_battery(p: SpectralParams, L_max: int = 64, quad_order: int | None = None,
                tol: float = 1e-8, seed: int = 42) -> list[CheckResult]:
    quad_order = L_max + 16 if quad_order is None else quad_order
    results: list[CheckResult] = []
    results += check_multipliers(p, max(tol, 1e-12))
    results += check_gegenbauer(p, max(tol, 1e-12))
    results += check_conformal(p, L_max, quad_order, seed)
    results += check_funk_hecke(p, tol)
    results += check_positivity(p, seed)
    results += check_ineq2()
    results += check_second_variation(p, tol)
    results += check_instability(p)
    return results
