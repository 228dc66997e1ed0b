"""Zonal functions on S^n: samples, Gegenbauer spectra, conformal dilations,
stereographic transfer and the negative-power integral.

A zonal function is a profile u(t) of the height t = omega_{n+1}. Its degree-l
spherical-harmonic component is u_l C_l(t), with C_l the Gegenbauer polynomial
of index (n-1)/2 (Chebyshev T_l on the circle).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import optimize, special

from .gegenbauer import (
    GegenbauerCoeffs,
    QuadratureRule,
    gegenbauer_norms,
    gegenbauer_table,
    quadrature_rule,
)
from .integrate import adaptive_gauss
from .special import POLE_TOL, SpectralParams, sphere_volume

DEFAULT_LMAX = 64
# samples for exact-spectrum profiles, whose band limit can be in the thousands
DEFAULT_GRID = DEFAULT_LMAX + 16
NONNEG_TOL = -1e-12
ZERO_REL_TOL = 1e-12
DIVERGENCE_SLACK = 1e-9
# relative amplitude below which projected coefficients are rounding noise
NOISE_FLOOR = 1e-14
INTEGRAL_ATOL = 1e-10
INTEGRAL_RTOL = 1e-11
POLE_RTOL = 1e-9

Profile = Callable[[np.ndarray], np.ndarray]


def default_rule(n: int, L_max: int) -> QuadratureRule:
    return quadrature_rule(n, L_max + 16)


@lru_cache(maxsize=64)
def _analysis_matrix(n: int, m: int) -> np.ndarray:
    # row l maps grid samples to the degree-l coefficient; all degrees < m
    rule = quadrature_rule(n, m)
    tab = gegenbauer_table(n, m - 1, rule.nodes)
    mat = tab * rule.weights / gegenbauer_norms(n, m - 1)[:, None]
    mat.setflags(write=False)
    return mat


@dataclass(frozen=True, eq=False)
class ZonalFunction:
    """Immutable zonal profile with its spectrum up to ``L_max``.

    ``norm_sq`` is the weighted integral of u^2 over [-1, 1] and ``tail_mass``
    the part of it carried by degrees above ``L_max``. ``closure``, when set,
    evaluates the profile exactly off the grid.
    """

    n: int
    rule: QuadratureRule
    values: np.ndarray
    coeffs: np.ndarray
    L_max: int
    norm_sq: float
    tail_mass: float
    closure: Profile | None = None

    def __post_init__(self):
        if self.rule.n != self.n:
            raise ValueError("quadrature rule belongs to a different dimension")
        if len(self.values) != self.rule.order:
            raise ValueError("values do not match the grid")
        if len(self.coeffs) != self.L_max + 1:
            raise ValueError("coefficient vector length must be L_max + 1")
        bad = np.flatnonzero(~np.isfinite(self.values))
        if bad.size:
            j = int(bad[0])
            raise ValueError(
                f"non-finite profile value {float(self.values[j])} at node t={float(self.rule.nodes[j])!r}"
            )
        self.values.setflags(write=False)
        self.coeffs.setflags(write=False)

    @property
    def residual(self) -> float:
        """Relative L^2 mass above L_max."""
        return self.tail_mass / self.norm_sq if self.norm_sq > 0 else 0.0

    @property
    def spectrum(self) -> GegenbauerCoeffs:
        return GegenbauerCoeffs(self.n, tuple(range(self.L_max + 1)), tuple(map(float, self.coeffs)))

    def synthesize(self, t) -> np.ndarray:
        return self.coeffs @ gegenbauer_table(self.n, self.L_max, t)

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        out = self.closure(t) if self.closure is not None else self.synthesize(t)
        out = np.broadcast_to(np.asarray(out, dtype=float), t.shape)
        return float(out) if out.ndim == 0 else np.array(out)

    __call__ = evaluate

    def scaled(self, c: float) -> "ZonalFunction":
        """The profile c*u."""
        f = self.closure
        return ZonalFunction(
            self.n, self.rule, c * self.values, c * self.coeffs, self.L_max,
            c * c * self.norm_sq, c * c * self.tail_mass,
            None if f is None else (lambda t: c * f(t)),
        )

    def shifted(self, eps: float) -> "ZonalFunction":
        """The profile u + eps; only the degree-0 coefficient moves."""
        coeffs = self.coeffs.copy()
        coeffs[0] += eps
        h0 = float(gegenbauer_norms(self.n, 0)[0])
        mean_part = self.coeffs[0] * h0
        norm_sq = self.norm_sq + 2 * eps * mean_part + eps * eps * h0
        f = self.closure
        return ZonalFunction(
            self.n, self.rule, self.values + eps, coeffs, self.L_max,
            norm_sq, self.tail_mass, None if f is None else (lambda t: f(t) + eps),
        )


def _sample(profile: Profile, nodes: np.ndarray) -> np.ndarray:
    vals = np.asarray(profile(nodes), dtype=float)
    return np.array(np.broadcast_to(vals, nodes.shape))


def from_samples(n: int, values, rule: QuadratureRule, L_max: int = DEFAULT_LMAX,
                 closure: Profile | None = None) -> ZonalFunction:
    """Project grid samples onto degrees 0..L_max; the tail is the discrete
    energy in degrees L_max+1..m-1, which by Gauss exactness is all of it."""
    values = np.asarray(values, dtype=float)
    m = rule.order
    if L_max < 0 or L_max > m - 1:
        raise ValueError(f"L_max must lie in [0, {m - 1}] for a {m}-point rule")
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        j = int(bad[0])
        raise ValueError(f"non-finite profile value {float(values[j])} at node t={float(rule.nodes[j])!r}")
    full = _analysis_matrix(n, m) @ values
    energy = full**2 * gegenbauer_norms(n, m - 1)
    total = float(energy.sum())
    # amplitudes at the rounding floor carry no information, and large
    # multipliers would amplify them
    noise = energy <= NOISE_FLOOR**2 * total
    full[noise] = 0.0
    tail = float(energy[L_max + 1:][~noise[L_max + 1:]].sum())
    return ZonalFunction(n, rule, values, full[: L_max + 1].copy(), L_max, total, tail, closure)


def make_zonal(n: int, profile: Profile, rule: QuadratureRule | None = None,
               L_max: int = DEFAULT_LMAX) -> ZonalFunction:
    """Sample ``profile`` (vectorized in t) and project it by quadrature."""
    rule = default_rule(n, L_max) if rule is None else rule
    return from_samples(n, _sample(profile, rule.nodes), rule, L_max, closure=profile)


def from_coeffs(n: int, coeffs, closure: Profile | None = None, L_max: int | None = None,
                rule: QuadratureRule | None = None) -> ZonalFunction:
    """A band-limited function given by its Gegenbauer coefficients."""
    if isinstance(coeffs, GegenbauerCoeffs):
        coeffs = coeffs.dense()
    coeffs = np.asarray(coeffs, dtype=float)
    deg = len(coeffs) - 1
    L_max = deg if L_max is None else L_max
    if L_max < deg and np.any(coeffs[L_max + 1:] != 0):
        raise ValueError("L_max below the degree of the given spectrum")
    dense = np.zeros(L_max + 1)
    dense[: min(deg, L_max) + 1] = coeffs[: L_max + 1]
    rule = quadrature_rule(n, max(L_max + 16, DEFAULT_GRID)) if rule is None else rule
    norm_sq = float(np.sum(dense**2 * gegenbauer_norms(n, L_max)))
    u = ZonalFunction(n, rule, np.zeros(rule.order), dense, L_max, norm_sq, 0.0, closure)
    values = _sample(closure, rule.nodes) if closure is not None else u.synthesize(rule.nodes)
    return ZonalFunction(n, rule, values, dense, L_max, norm_sq, 0.0, closure)


# ---------------------------------------------------------------------------
# exact spectra of sums of powers of (1+t)


def _jacobi_shift(n: int) -> float:
    return (n - 2) / 2


def _log_basis_scale(n: int, ell: np.ndarray) -> np.ndarray:
    # C_l = r_l P_l^{(a,a)} with a = (n-2)/2 (T_l for n = 1)
    if n == 1:
        return special.gammaln(ell + 1) + special.gammaln(0.5) - special.gammaln(ell + 0.5)
    al = (n - 1) / 2
    return (special.gammaln(2 * al + ell) + special.gammaln(al + 0.5)
            - special.gammaln(2 * al) - special.gammaln(al + 0.5 + ell))


def power_moments(n: int, q: float, L: int) -> np.ndarray:
    """Integrals of (1+t)^q C_l(t) (1-t^2)^{(n-2)/2} over [-1, 1] for l = 0..L.

    Rodrigues' formula for Jacobi polynomials and l integrations by parts give
    a product of gamma functions; the falling factorial q(q-1)...(q-l+1)
    vanishes for integer q < l.
    """
    if q < 0:
        raise ValueError("power must be nonnegative")
    a = _jacobi_shift(n)
    ell = np.arange(L + 1, dtype=float)
    fall_arg = q - ell + 1
    pole = (fall_arg <= POLE_TOL) & (np.abs(fall_arg - np.round(fall_arg)) <= POLE_TOL)
    safe = np.where(pole, 0.5, fall_arg)
    log_mag = (
        _log_basis_scale(n, ell)
        + special.gammaln(q + 1) - special.gammaln(safe)
        + (q + 2 * a + 1) * math.log(2)
        + special.gammaln(q + a + 1) + special.gammaln(ell + a + 1)
        - special.gammaln(ell + 1) - special.gammaln(q + ell + 2 * a + 2)
    )
    sign = special.gammasgn(safe)
    return np.where(pole, 0.0, sign * np.exp(log_mag))


def _power_inner(n: int, q1: float, q2: float) -> float:
    a = _jacobi_shift(n)
    q = q1 + q2
    return math.exp((q + 2 * a + 1) * math.log(2) + special.betaln(q + a + 1, a + 1))


def power_profile(n: int, terms: Sequence[tuple[float, float]], L_max: int = DEFAULT_LMAX,
                  rule: QuadratureRule | None = None) -> ZonalFunction:
    """u(t) = sum_j a_j (1+t)^{q_j} with its spectrum computed in closed form.

    ``terms`` is a sequence of (a_j, q_j). The norm is exact as well, so the
    recorded tail is the true L^2 mass above L_max.
    """
    terms = [(float(a), float(q)) for a, q in terms]
    if not terms:
        raise ValueError("need at least one term")
    h = gegenbauer_norms(n, L_max)
    coeffs = sum(a * power_moments(n, q, L_max) for a, q in terms) / h
    norm_sq = sum(a1 * a2 * _power_inner(n, q1, q2) for a1, q1 in terms for a2, q2 in terms)
    partial = float(np.sum(coeffs**2 * h))
    tail = max(norm_sq - partial, 0.0)
    if any(a != 0 and q != round(q) for a, q in terms):
        # non-polynomial: the spectrum never terminates even if its mass is below rounding
        tail = max(tail, np.finfo(float).eps * norm_sq)

    def closure(t):
        t = np.asarray(t, dtype=float)
        base = np.maximum(1.0 + t, 0.0)
        return sum(a * base**q for a, q in terms)

    rule = quadrature_rule(n, DEFAULT_GRID) if rule is None else rule
    return ZonalFunction(n, rule, _sample(closure, rule.nodes), coeffs, L_max, norm_sq, tail, closure)


def sphere_l2_norm_sq(u: ZonalFunction, ell: int) -> float:
    """||P_l u||^2 on S^n = |S^{n-1}| u_l^2 ||C_l||^2."""
    if ell < 0 or ell > u.L_max:
        raise ValueError(f"degree {ell} outside the computed spectrum 0..{u.L_max}")
    return sphere_volume(u.n - 1) * float(u.coeffs[ell]) ** 2 * float(gegenbauer_norms(u.n, ell)[ell])


def sphere_l2_norm_sq_all(u: ZonalFunction) -> np.ndarray:
    return sphere_volume(u.n - 1) * u.coeffs**2 * gegenbauer_norms(u.n, u.L_max)


# ---------------------------------------------------------------------------
# conformal dilations


@dataclass(frozen=True)
class ConformalDilation:
    """Stereographic conjugate of x -> lam x, acting on the height t."""

    lam: float

    def __post_init__(self):
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ValueError(f"dilation parameter must be positive, got {self.lam!r}")

    def denominator(self, t):
        return (1 + t) + self.lam**2 * (1 - t)

    def map_height(self, t):
        t = np.asarray(t, dtype=float)
        return ((1 + t) - self.lam**2 * (1 - t)) / self.denominator(t)

    def jacobian_root(self, t):
        """J^{1/n}, the linear conformal factor."""
        t = np.asarray(t, dtype=float)
        return 2 * self.lam / self.denominator(t)

    def compose(self, other: "ConformalDilation") -> "ConformalDilation":
        return ConformalDilation(self.lam * other.lam)


def conformal_dilate(u: ZonalFunction, d: ConformalDilation | float, p: SpectralParams) -> ZonalFunction:
    """u_Phi(t) = J(t)^{-(2s-n)/(2n)} u(Phi(t)), re-projected on u's grid."""
    if not isinstance(d, ConformalDilation):
        d = ConformalDilation(float(d))
    if d.lam == 1.0:
        return u
    expo = -p.excess

    def closure(t):
        return d.jacobian_root(t) ** expo * u.evaluate(d.map_height(t))

    return make_zonal(u.n, closure, u.rule, u.L_max)


def equality_profile(p: SpectralParams, zeta: float, c: float = 1.0, L_max: int = DEFAULT_LMAX,
                     rule: QuadratureRule | None = None) -> ZonalFunction:
    """c (1 - zeta t)^{(2s-n)/2}, the conformal orbit of the constants."""
    if not abs(zeta) < 1:
        raise ValueError(f"need |zeta| < 1, got {zeta!r}")
    if not c > 0:
        raise ValueError(f"need c > 0, got {c!r}")
    delta = p.excess
    return make_zonal(p.n, lambda t: c * (1 - zeta * np.asarray(t)) ** delta, rule, L_max)


def vanishing_profile(p: SpectralParams, order: int = 1, L_max: int = DEFAULT_LMAX,
                      rule: QuadratureRule | None = None) -> ZonalFunction:
    """(1+t)^{(2s-n)/2} (order 1) or (1+t)^{(2s-n)/2} (1-t) (order 2), exact spectra."""
    delta = p.excess
    if not delta < 2:
        raise ValueError("vanishing profiles need n/2 < s < (n+4)/2")
    if order == 1:
        terms = [(1.0, delta)]
    elif order == 2:
        terms = [(2.0, delta), (-1.0, delta + 1)]
    else:
        raise ValueError("order must be 1 or 2")
    return power_profile(p.n, terms, L_max, rule)


def stereographic_value(u: ZonalFunction, p: SpectralParams, r):
    """u_S(r) = ((1+r^2)/2)^{(2s-n)/2} u((1-r^2)/(1+r^2))."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("radius must be nonnegative")
    rr = r * r
    out = ((1 + rr) / 2) ** p.excess * np.asarray(u.evaluate((1 - rr) / (1 + rr)))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# negative-power integral


@dataclass(frozen=True)
class ZeroInfo:
    t0: float
    order: float
    critical: float  # exponent the order is compared against
    divergent: bool


@dataclass(frozen=True)
class NegPowerResult:
    value: float
    divergent: bool
    zeros: tuple[ZeroInfo, ...]
    converged: bool


def _dense_heights() -> np.ndarray:
    t = np.cos(np.linspace(0.0, math.pi, 2049))
    t[0], t[1024], t[-1] = 1.0, 0.0, -1.0
    return t


_DENSE_T = _dense_heights()
_ORDER_STEPS = (1e-2, 1e-3, 1e-4)


def _one_sided_order(u: ZonalFunction, t0: float, side: int) -> float:
    h = np.array(_ORDER_STEPS)
    vals = np.abs(np.asarray(u.evaluate(t0 + side * h)))
    if np.any(vals == 0):
        return math.inf
    logs = np.log10(vals)
    q1, q2 = logs[0] - logs[1], logs[1] - logs[2]
    # slope error is linear in the step, steps shrink by 10
    return q2 + (q2 - q1) / 9


def _locate_zeros(u: ZonalFunction, t: np.ndarray, vals: np.ndarray, scale: float) -> list[float]:
    order = np.argsort(t)
    t, vals = t[order], np.abs(vals[order])
    zeros = [float(x) for x in t[vals <= ZERO_REL_TOL * scale]]
    for i in range(1, len(t) - 1):
        if vals[i] <= vals[i - 1] and vals[i] <= vals[i + 1] and vals[i] <= 1e-3 * scale:
            if any(abs(z - t[i]) < 1e-8 for z in zeros) or vals[i] <= ZERO_REL_TOL * scale:
                continue
            res = optimize.minimize_scalar(
                lambda x: abs(float(u.evaluate(x))), bounds=(t[i - 1], t[i + 1]),
                method="bounded", options={"xatol": 1e-14},
            )
            if abs(float(u.evaluate(res.x))) <= ZERO_REL_TOL * scale:
                zeros.append(float(res.x))
    merged: list[float] = []
    for z in sorted(zeros):
        if not merged or z - merged[-1] > 1e-8:
            merged.append(z)
    return merged


def _analyze_zero(u: ZonalFunction, t0: float, expo: float) -> ZeroInfo:
    n = u.n
    if t0 >= 1 - 1e-15:
        q, crit = _one_sided_order(u, 1.0, -1), n / 2
        t0 = 1.0
    elif t0 <= -1 + 1e-15:
        q, crit = _one_sided_order(u, -1.0, 1), n / 2
        t0 = -1.0
    else:
        q = max(_one_sided_order(u, t0, s) for s in (-1, 1) if -1 < t0 + s * 1e-2 < 1)
        crit = 1.0
    return ZeroInfo(float(t0), float(q), crit, bool(q * expo >= crit - DIVERGENCE_SLACK))


def _singular_piece(F, t0: float, sgn: int, span: float, gamma: float):
    """Integral of F(t, sin theta) over theta between theta0 = acos(t0) and
    theta0 + sgn*span, where the integrand behaves like |theta - theta0|^{-gamma}.

    Heights are formed from the offset d to theta0 so that they stay accurate
    next to the zero. Below ``d_min`` rounding dominates the profile, so that
    sliver is closed with the local power law.
    """
    c0, s0 = t0, math.sqrt(max(1.0 - t0 * t0, 0.0))
    d_min = 1e-4 if s0 == 0.0 else 1e-6
    m = max(1, math.ceil(2 / (1 - gamma)))

    def at(d):
        d = sgn * d
        return F(c0 * np.cos(d) - s0 * np.sin(d), np.abs(s0 * np.cos(d) + c0 * np.sin(d)))

    def g(y):
        return at(y**m) * m * y ** (m - 1)

    # at a pole 1+t (or 1-t) carries absolute rounding ~1e-16, about 1e-8
    # relative at d_min, so the attainable tolerance is looser there
    rtol = POLE_RTOL if s0 == 0.0 else INTEGRAL_RTOL
    body = adaptive_gauss(g, d_min ** (1 / m), span ** (1 / m), atol=INTEGRAL_ATOL, rtol=rtol)
    sliver = float(at(np.array([d_min]))[0]) * d_min / (1 - gamma)
    return body.value + sliver, body.converged


def analyze_neg_power(u: ZonalFunction, p: SpectralParams) -> NegPowerResult:
    """|S^{n-1}| times the weighted integral of u^{-2n/(2s-n)}, with divergence certification.

    The integral runs in the polar angle, where the weight becomes sin^{n-1}.
    Zeros of the profile are located, their vanishing order estimated from
    log-log slopes, and the integral is declared +inf when order * exponent
    reaches the critical value (1 inside, n/2 at the poles).
    """
    if p.n != u.n:
        raise ValueError("dimension mismatch")
    expo = p.neg_exponent
    probe = np.concatenate([_DENSE_T, u.rule.nodes])
    vals = np.asarray(u.evaluate(probe))
    low = float(np.min(np.concatenate([vals, u.values])))
    if low < NONNEG_TOL:
        raise ValueError(f"profile not nonnegative (minimum {low:.3e})")
    scale = float(np.max(np.abs(vals)))
    if scale == 0:
        zero = ZeroInfo(0.0, math.inf, 1.0, True)
        return NegPowerResult(math.inf, True, (zero,), True)

    zeros = tuple(_analyze_zero(u, z, expo) for z in _locate_zeros(u, probe, vals, scale))
    if any(z.divergent for z in zeros):
        return NegPowerResult(math.inf, True, zeros, True)

    n = u.n

    def F(t, sin_theta):
        w = np.abs(np.asarray(u.evaluate(t))) ** (-expo)
        return w * sin_theta ** (n - 1) if n > 1 else w

    def f(theta):
        return F(np.cos(theta), np.sin(theta))

    # exponent of the theta-integrand's blow-up at each zero, keyed by angle;
    # every zero gets the offset parametrization so u is never sampled at 0
    sing = {}
    for z in zeros:
        theta0 = 0.0 if z.t0 == 1.0 else math.pi if z.t0 == -1.0 else math.acos(z.t0)
        gamma = 2 * z.order * expo - (n - 1) if z.t0 in (1.0, -1.0) else z.order * expo
        sing[theta0] = (z.t0, gamma)
    edges = sorted({0.0, math.pi, *sing})
    total, ok = 0.0, True
    for lo, hi in zip(edges, edges[1:]):
        if lo not in sing and hi not in sing:
            r = adaptive_gauss(f, lo, hi, INTEGRAL_ATOL, INTEGRAL_RTOL)
            total += r.value
            ok = ok and r.converged
            continue
        mid = 0.5 * (lo + hi)
        for end, sgn, a, b in ((lo, 1, lo, mid), (hi, -1, mid, hi)):
            if end in sing:
                t0, gamma = sing[end]
                value, conv = _singular_piece(F, t0, sgn, mid - lo, gamma)
            else:
                r = adaptive_gauss(f, a, b, INTEGRAL_ATOL, INTEGRAL_RTOL)
                value, conv = r.value, r.converged
            total += value
            ok = ok and conv
    value = sphere_volume(n - 1) * total
    return NegPowerResult(float(value), False, zeros, bool(ok and math.isfinite(value)))


def neg_power_integral(u: ZonalFunction, p: SpectralParams) -> float:
    return analyze_neg_power(u, p).value


# ---------------------------------------------------------------------------
# import / export


def to_json_dict(u: ZonalFunction) -> dict:
    return {
        "n": u.n,
        "L_max": u.L_max,
        "spectrum": [{"degree": i, "coeff": float(c)} for i, c in enumerate(u.coeffs)],
        "grid": [{"t": float(t), "value": float(v)} for t, v in zip(u.rule.nodes, u.values)],
        "truncation_residual": u.residual,
    }


def _rule_for_nodes(n: int, t: np.ndarray) -> QuadratureRule:
    rule = quadrature_rule(n, len(t))
    if not np.allclose(np.sort(t), rule.nodes, rtol=0, atol=1e-12):
        raise ValueError(f"grid is not the {len(t)}-point Gauss rule for n={n}")
    return rule


def from_json_dict(d: dict) -> ZonalFunction:
    n, L = int(d["n"]), int(d["L_max"])
    grid = sorted((float(g["t"]), float(g["value"])) for g in d["grid"])
    t = np.array([g[0] for g in grid])
    rule = _rule_for_nodes(n, t)
    coeffs = np.zeros(L + 1)
    for item in d["spectrum"]:
        coeffs[int(item["degree"])] = float(item["coeff"])
    values = np.array([g[1] for g in grid])
    partial = float(np.sum(coeffs**2 * gegenbauer_norms(n, L)))
    resid = float(d.get("truncation_residual", 0.0))
    # residual r = tail / (partial + tail)
    tail = partial * resid / (1 - resid) if resid < 1 else math.inf
    return ZonalFunction(n, rule, values, coeffs, L, partial + tail, tail)


def to_csv(u: ZonalFunction) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "value"])
    for t, v in zip(u.rule.nodes, u.values):
        w.writerow([format(float(t), ".17g"), format(float(v), ".17g")])
    return buf.getvalue()


def from_csv(text: str, n: int, L_max: int = DEFAULT_LMAX) -> ZonalFunction:
    rows = list(csv.reader(io.StringIO(text)))
    if rows and rows[0] and rows[0][0].strip() == "t":
        rows = rows[1:]
    data = sorted((float(r[0]), float(r[1])) for r in rows if r)
    t = np.array([x for x, _ in data])
    rule = _rule_for_nodes(n, t)
    return from_samples(n, np.array([v for _, v in data]), rule, L_max)
