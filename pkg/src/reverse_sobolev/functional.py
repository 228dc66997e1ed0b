"""The quadratic form a_2s, the conformal quotient, the second variation at
the constants, the Funk-Hecke consistency check, and the test functions that
drive the quotient to -inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import special as sc

from .gegenbauer import (
    gegenbauer_norm_sq,
    gegenbauer_table,
    monomial_even_coeffs,
    monomial_odd_coeffs,
    quadrature_rule,
)
from .integrate import adaptive_gauss
from .serialization import INDETERMINATE, ExtReal, decode_ext, encode_ext
from .special import SpectralParams, gamma_ratio, instability_case, multiplier, multipliers, sphere_volume
from .zonal import ZonalFunction, analyze_neg_power, from_coeffs, make_zonal, sphere_l2_norm_sq_all

MAX_RESIDUAL = 1e-10
# a truncated form within this fraction of sum |terms| counts as zero
ZERO_FORM_TOL = 1e-6


@dataclass(frozen=True)
class QuadFormResult:
    value: float            # sum over degrees 0..L_max
    terms: np.ndarray       # alpha(l) ||P_l u||^2
    tail_bound: float       # alpha(L_max) |S^{n-1}| (tail mass)
    tail_estimate: float    # power-law extrapolation of the omitted terms
    residual: float

    @property
    def scale(self) -> float:
        return float(np.sum(np.abs(self.terms)))

    @property
    def extrapolated(self) -> float:
        return self.value + self.tail_estimate


def estimate_tail(terms: np.ndarray) -> float:
    """Extrapolate sum_{l > L} T_l from the last three quarters of the terms.

    Fits log T_l = c0 - p log l + c1/l and sums the model with Hurwitz zeta
    functions. Returns 0 when the terms have already died out or the fit is
    not applicable (sign changes, too few terms, no decay).
    """
    L = len(terms) - 1
    scale = float(np.sum(np.abs(terms)))
    if L < 16 or scale == 0 or np.all(np.abs(terms[-4:]) <= 1e-15 * scale):
        return 0.0
    ell = np.arange(L // 4, L + 1)
    window = terms[L // 4:]
    live = window != 0
    # spectra of even or odd profiles live on one parity only
    parities = set(ell[live] % 2)
    stride = 2 if len(parities) == 1 else 1
    if np.count_nonzero(live) < 8 or np.any(window[live] < 0):
        return 0.0
    x = ell[live].astype(float)
    design = np.stack([np.ones_like(x), -np.log(x), 1.0 / x], axis=1)
    (c0, power, c1), *_ = np.linalg.lstsq(design, np.log(window[live]), rcond=None)
    if power <= 1.0:
        return math.inf
    first = L + 1
    while stride == 2 and first % 2 not in parities:
        first += 1
    a = first / stride
    return float(math.exp(c0) * stride ** (-power)
                 * (sc.zeta(power, a) + c1 / stride * sc.zeta(power + 1, a)))


def quad_form_details(u: ZonalFunction, p: SpectralParams,
                      max_residual: float = MAX_RESIDUAL) -> QuadFormResult:
    if u.n != p.n:
        raise ValueError("dimension mismatch")
    if u.residual > max_residual:
        raise ValueError(
            f"insufficient band limit: relative L2 mass {u.residual:.3e} above degree "
            f"{u.L_max} exceeds {max_residual:.1e}"
        )
    alpha = multipliers(p, u.L_max)
    terms = alpha * sphere_l2_norm_sq_all(u)
    tail_bound = float(alpha[-1]) * sphere_volume(u.n - 1) * u.tail_mass
    tail = estimate_tail(terms) if u.tail_mass > 0 else 0.0
    return QuadFormResult(float(np.sum(terms)), terms, tail_bound, tail, u.residual)


def quad_form(u: ZonalFunction, p: SpectralParams, max_residual: float = MAX_RESIDUAL) -> float:
    """a_2s[u] = sum_l alpha(l) ||P_l u||^2 over the computed spectrum."""
    return quad_form_details(u, p, max_residual).value


def hs_proxy_norm_sq(u: ZonalFunction, p: SpectralParams) -> float:
    """sum_l (1+l)^{2s} ||P_l u||^2, the scale for positivity tolerances."""
    ell = np.arange(u.L_max + 1, dtype=float)
    return float(np.sum((1 + ell) ** (2 * p.s) * sphere_l2_norm_sq_all(u)))


@dataclass(frozen=True)
class FunctionalReport:
    a_value: float
    integral: ExtReal
    quotient: ExtReal
    truncation_residual: float
    divergence_certified: bool
    tail_estimate: float = 0.0

    def to_dict(self) -> dict:
        return {
            "a_value": encode_ext(self.a_value),
            "integral": encode_ext(self.integral),
            "quotient": encode_ext(self.quotient),
            "truncation_residual": self.truncation_residual,
            "divergence_certified": self.divergence_certified,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FunctionalReport":
        return cls(
            float(decode_ext(d["a_value"])),
            decode_ext(d["integral"]),
            decode_ext(d["quotient"]),
            float(d["truncation_residual"]),
            bool(d["divergence_certified"]),
        )


def combine(a: QuadFormResult, integral: float, power: float) -> ExtReal:
    """a * integral^power in extended arithmetic.

    With a divergent integral only the sign of a matters; it is read off the
    extrapolated form, and a form that is zero to within ZERO_FORM_TOL of its
    scale gives the indeterminate state.
    """
    if math.isfinite(integral):
        return a.value * integral**power
    a_ext = a.extrapolated
    if abs(a_ext) <= ZERO_FORM_TOL * a.scale:
        return INDETERMINATE
    return -math.inf if a_ext < 0 else math.inf


def quotient(u: ZonalFunction, p: SpectralParams, max_residual: float = MAX_RESIDUAL) -> FunctionalReport:
    """a_2s[u] (integral of u^{-2n/(2s-n)})^{(2s-n)/n} with its ingredients."""
    a = quad_form_details(u, p, max_residual)
    neg = analyze_neg_power(u, p)
    q = combine(a, neg.value, p.integral_power)
    return FunctionalReport(a.value, neg.value, q, u.residual, neg.divergent, a.tail_estimate)


def second_variation(p: SpectralParams, ell: int) -> float:
    """alpha(l) + (2s+n)/(2s-n) alpha(0), the Hessian of the quotient at 1 on degree l."""
    if ell < 1:
        raise ValueError("degree must be >= 1")
    return multiplier(p, ell) + (2 * p.s + p.n) / (2 * p.s - p.n) * multiplier(p, 0)


# ---------------------------------------------------------------------------
# Funk-Hecke


FH_SAMPLE_HEIGHTS = (-0.9, -0.35, 0.1, 0.55, 0.95)


def riesz_eigenvalue(p: SpectralParams, ell: int) -> float:
    """Eigenvalue of the kernel |w - w'|^{2s-n} on degree-l harmonics.

    2^{2s} pi^{n/2} Gamma(s) (n/2-s)_l / Gamma(l+n/2+s); the Pochhammer form is
    the continuous extension through s in n/2 + N, where it vanishes for large l.
    """
    n, s = p.n, p.s
    poch = math.prod(n / 2 - s + j for j in range(ell))
    log_rest = 2 * s * math.log(2) + (n / 2) * math.log(math.pi) + math.lgamma(s) - math.lgamma(ell + n / 2 + s)
    return poch * math.exp(log_rest)


def riesz_potential(p: SpectralParams, ell: int, t: float) -> float:
    """Integral over S^n of |w - w'|^{2s-n} C_l(w'_{n+1}) at a point w of height t.

    Computed directly in polar coordinates about w: geodesic distance g and an
    azimuth psi, so w'_{n+1} = t cos g + sqrt(1-t^2) sin g cos psi. The azimuthal
    integral is a polynomial against sin^{n-2} and is done exactly by Gauss.
    """
    n = p.n
    expo = 2 * p.s - n
    root = math.sqrt(max(1 - t * t, 0.0))
    if n == 1:
        def f(g):
            kern = (2 * np.sin(g / 2)) ** expo
            return kern * (np.cos(ell * (math.acos(t) + g)) + np.cos(ell * (math.acos(t) - g)))
        r = adaptive_gauss(f, 0.0, math.pi, atol=1e-14, rtol=1e-13)
        return r.value
    inner = quadrature_rule(n - 1, max(2, ell // 2 + 2))
    x, w = inner.nodes, inner.weights

    def f(g):
        g = np.asarray(g)[:, None]
        height = t * np.cos(g) + root * np.sin(g) * x[None, :]
        poly = gegenbauer_table(n, ell, height)[ell]
        kern = (2 * np.sin(g[:, 0] / 2)) ** expo * np.sin(g[:, 0]) ** (n - 1)
        return kern * (poly @ w)

    r = adaptive_gauss(f, 0.0, math.pi, atol=1e-14, rtol=1e-13)
    return sphere_volume(n - 2) * r.value


def funk_hecke_residual(p: SpectralParams, ell: int, heights=FH_SAMPLE_HEIGHTS) -> float:
    """max |direct - eigenvalue * C_l| / max |eigenvalue * C_l| over sample heights."""
    if ell < 0:
        raise ValueError("degree must be nonnegative")
    lam = riesz_eigenvalue(p, ell)
    t = np.asarray(heights, dtype=float)
    basis = gegenbauer_table(p.n, ell, t)[ell]
    rhs = lam * basis
    lhs = np.array([riesz_potential(p, ell, float(x)) for x in t])
    denom = float(np.max(np.abs(rhs)))
    if denom == 0:
        # eigenvalue vanishes; measure against the degree-0 eigenvalue instead
        denom = riesz_eigenvalue(p, 0) * float(np.max(np.abs(basis)))
    return float(np.max(np.abs(lhs - rhs))) / denom


# ---------------------------------------------------------------------------
# instability test functions


def _require_case(p: SpectralParams, parity: str, K: int):
    if p.n < 2:
        raise ValueError("K incompatible with (n,s): the construction needs n >= 2")
    try:
        case = instability_case(p)
    except ValueError:
        case = None
    if K < 1 or case != (parity, K):
        raise ValueError(f"K incompatible with (n,s): K={K} for n={p.n}, s={p.s}")


def _polynomial(n: int, closure, degree: int) -> ZonalFunction:
    # a Gauss rule with more than degree/2 + 1 nodes projects a polynomial exactly
    return make_zonal(n, closure, quadrature_rule(n, degree + 16), L_max=degree)


def even_test_function(n: int, K: int) -> ZonalFunction:
    """t^{2K} with its exact Gegenbauer expansion (projected on the circle)."""
    def closure(t):
        return np.asarray(t, dtype=float) ** (2 * K)

    if n == 1:
        return _polynomial(n, closure, 2 * K)
    return from_coeffs(n, monomial_even_coeffs(n, K).dense(2 * K), closure=closure)


def odd_test_function(n: int, K: int) -> ZonalFunction:
    """t^{2K} - t^{2K+1} with its exact Gegenbauer expansion (projected on the circle)."""
    def closure(t):
        t = np.asarray(t, dtype=float)
        return t ** (2 * K) * (1 - t)

    if n == 1:
        return _polynomial(n, closure, 2 * K + 1)
    coeffs = monomial_even_coeffs(n, K).dense(2 * K + 1) - monomial_odd_coeffs(n, K).dense(2 * K + 1)
    return from_coeffs(n, coeffs, closure=closure)


def instability_even(p: SpectralParams, K: int) -> FunctionalReport:
    """Quotient report for t^{2K} when 2K < s - n/2 < 2K+1."""
    _require_case(p, "even", K)
    return quotient(even_test_function(p.n, K), p)


def instability_odd(p: SpectralParams, K: int) -> FunctionalReport:
    """Quotient report for t^{2K} - t^{2K+1} when 2K+1 < s - n/2 < 2K+2."""
    _require_case(p, "odd", K)
    return quotient(odd_test_function(p.n, K), p)


def odd_bracket_terms(p: SpectralParams, K: int) -> list[float]:
    """c_k^2 N_2k - (2s+n+4k)/(2s-n-4k) d_k^2 N_{2k+1} for k = 0..K, N the sphere norms."""
    n, s = p.n, p.s
    c = monomial_even_coeffs(n, K).values
    d = monomial_odd_coeffs(n, K).values
    area = sphere_volume(n - 1)
    out = []
    for k in range(K + 1):
        factor = (2 * s + n + 4 * k) / (2 * s - n - 4 * k)
        even = c[k] ** 2 * area * gegenbauer_norm_sq(n, 2 * k)
        odd = d[k] ** 2 * area * gegenbauer_norm_sq(n, 2 * k + 1)
        out.append(even - factor * odd)
    return out


def even_spectral_sum(p: SpectralParams, K: int) -> float:
    """sum_k alpha(2k) c_k^2 ||C_2k||^2 for t^{2K}, straight from the closed forms."""
    c = monomial_even_coeffs(p.n, K).values
    area = sphere_volume(p.n - 1)
    return sum(
        gamma_ratio(2 * k + p.n / 2 + p.s, 2 * k + p.n / 2 - p.s).value
        * c[k] ** 2 * area * gegenbauer_norm_sq(p.n, 2 * k)
        for k in range(K + 1)
    )


# ---------------------------------------------------------------------------
# the rational inequality behind the odd case


def ineq2_fraction(n: int, K: int, k: int) -> Fraction:
    if n < 2 or K < 1 or not 0 <= k <= K:
        raise ValueError("need n >= 2, K >= 1 and 0 <= k <= K")
    first = Fraction(2 * K + 2 + n + 2 * k, 2 * K + 2 - 2 * k)
    second = Fraction(
        (2 * K + 1) ** 2 * (2 * k + n - 1) * (4 * k + n + 1),
        (2 * K + 2 * k + n + 1) ** 2 * (2 * k + 1) * (4 * k + n - 1),
    )
    return first * second


def ineq2_lhs(n: int, K: int, k: int) -> float:
    return float(ineq2_fraction(n, K, k))


def monotone_factor(n: int, K: int, k: int) -> Fraction:
    """(4k+n+1)(2K+2+n+2k)/(2K+2k+n+1)^2."""
    return Fraction((4 * k + n + 1) * (2 * K + 2 + n + 2 * k), (2 * K + 2 * k + n + 1) ** 2)


@dataclass(frozen=True)
class Ineq2Report:
    n_max: int
    K_max: int
    checked: int
    violations: tuple[tuple[int, int, int], ...]
    monotonicity_violations: tuple[tuple[int, int, int], ...]
    minimum: Fraction
    argmin: tuple[int, int, int]

    @property
    def passed(self) -> bool:
        return not self.violations and not self.monotonicity_violations


def ineq2_verify(n_max: int, K_max: int) -> Ineq2Report:
    """Check the inequality >= 1 and the monotonicity in n, all in integers."""
    if n_max < 2 or K_max < 1:
        raise ValueError("need n_max >= 2 and K_max >= 1")
    violations, mono, checked = [], [], 0
    best, arg = None, None
    for K in range(1, K_max + 1):
        for k in range(K + 1):
            prev = None
            for n in range(2, n_max + 1):
                v = ineq2_fraction(n, K, k)
                checked += 1
                # cross-multiplied: numerator >= denominator
                if v.numerator < v.denominator:
                    violations.append((n, K, k))
                if best is None or v < best:
                    best, arg = v, (n, K, k)
                if k <= K - 1:
                    cur = monotone_factor(n, K, k)
                    if prev is not None and cur.numerator * prev.denominator < prev.numerator * cur.denominator:
                        mono.append((n, K, k))
                    prev = cur
    return Ineq2Report(n_max, K_max, checked, tuple(violations), tuple(mono), best, arg)
