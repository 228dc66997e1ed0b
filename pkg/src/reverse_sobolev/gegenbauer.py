"""Gegenbauer polynomials C_l^{((n-1)/2)}, Gauss rules for (1-t^2)^{(n-2)/2}, norms.

For n = 1 the zonal basis is the Chebyshev family T_l(t) = cos(l arccos t)
with the Chebyshev weight; the Gegenbauer formulas carry Gamma((n-1)/2)
factors that are singular there, so that dimension is a separate branch
throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

NEWTON_TOL = 1e-14
NEWTON_MAXITER = 100


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class GegenbauerCoeffs:
    n: int
    degrees: tuple[int, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.degrees) != len(self.values):
            raise ValueError("degrees and values differ in length")
        if any(d < 0 for d in self.degrees) or any(
            b <= a for a, b in zip(self.degrees, self.degrees[1:])
        ):
            raise ValueError("degrees must be nonnegative and strictly increasing")

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.degrees, self.values))

    def dense(self, L: int | None = None) -> np.ndarray:
        L = max(self.degrees, default=0) if L is None else L
        out = np.zeros(L + 1)
        for d, v in zip(self.degrees, self.values):
            if d <= L:
                out[d] = v
        return out


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Gauss nodes and weights on [-1, 1] for the weight (1-t^2)^{(n-2)/2}."""

    n: int
    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


def _alpha(n: int) -> float:
    return (n - 1) / 2


def gegenbauer_table(n: int, L: int, t) -> np.ndarray:
    """Rows 0..L of the zonal basis evaluated at ``t``; shape (L+1,) + shape(t)."""
    t = np.asarray(t, dtype=float)
    out = np.empty((L + 1,) + t.shape)
    out[0] = 1.0
    if L == 0:
        return out
    if n == 1:
        out[1] = t
        for k in range(1, L):
            out[k + 1] = 2 * t * out[k] - out[k - 1]
        return out
    a = _alpha(n)
    out[1] = 2 * a * t
    for k in range(1, L):
        out[k + 1] = (2 * (k + a) * t * out[k] - (k + 2 * a - 1) * out[k - 1]) / (k + 1)
    return out


def gegenbauer_eval(n: int, ell: int, t):
    """C_l^{((n-1)/2)}(t) by the three-term recurrence (T_l(t) when n = 1)."""
    if ell < 0:
        raise ValueError("degree must be nonnegative")
    vals = gegenbauer_table(n, ell, t)[ell]
    return float(vals) if vals.ndim == 0 else vals


def weight_integral(n: int) -> float:
    """Integral of (1-t^2)^{(n-2)/2} over [-1, 1]."""
    return math.sqrt(math.pi) * math.gamma(n / 2) / math.gamma((n + 1) / 2)


def log_gegenbauer_norm_sq(n: int, ell: int) -> float:
    if n == 1:
        return math.log(math.pi if ell == 0 else math.pi / 2)
    a = _alpha(n)
    return (
        math.log(math.pi)
        + (1 - 2 * a) * math.log(2)
        + math.lgamma(2 * a + ell)
        - math.lgamma(ell + 1)
        - math.log(ell + a)
        - 2 * math.lgamma(a)
    )


def gegenbauer_norm_sq(n: int, ell: int) -> float:
    """Integral of C_l(t)^2 (1-t^2)^{(n-2)/2} over [-1, 1].

    Equals pi 2^{2-n} Gamma(n-1+l) / (l! (l+(n-1)/2) Gamma((n-1)/2)^2) for
    n >= 2; for n = 1 it is pi/2 (l >= 1) or pi (l = 0).
    """
    return math.exp(log_gegenbauer_norm_sq(n, ell))


@lru_cache(maxsize=None)
def _norms(n: int, L: int) -> np.ndarray:
    out = np.array([gegenbauer_norm_sq(n, ell) for ell in range(L + 1)])
    out.setflags(write=False)
    return out


def gegenbauer_norms(n: int, L: int) -> np.ndarray:
    return _norms(n, L)


def _golub_welsch_guess(n: int, m: int) -> np.ndarray:
    a = _alpha(n)
    k = np.arange(1, m)
    beta = k * (k + 2 * a - 1) / (4 * (k + a) * (k + a - 1))
    return np.linalg.eigvalsh(np.diag(np.sqrt(beta), 1) + np.diag(np.sqrt(beta), -1))


def _newton(n: int, m: int, x: np.ndarray):
    """Polish guesses ``x`` into roots of C_m; returns (roots, iterations, last step)."""
    a = _alpha(n)
    dx = np.full_like(x, np.inf)
    for it in range(1, NEWTON_MAXITER + 1):
        tab = gegenbauer_table(n, m, x)
        # (1-x^2) C_m' = (m+2a-1) C_{m-1} - m x C_m
        dp = ((m + 2 * a - 1) * tab[m - 1] - m * x * tab[m]) / ((1 - x) * (1 + x))
        dx = tab[m] / dp
        x = x - dx
        if np.max(np.abs(dx)) < NEWTON_TOL:
            return np.sort(x), it, float(np.max(np.abs(dx)))
    return None, NEWTON_MAXITER, float(np.max(np.abs(dx)))


def _valid(x) -> bool:
    return x is not None and x[0] > -1 and x[-1] < 1 and bool(np.all(np.diff(x) > 0))


def _newton_roots(n: int, m: int) -> np.ndarray:
    jb = _alpha(n) - 0.5
    j = np.arange(1, m + 1)
    # cosine guesses for the symmetric Jacobi family with exponents a - 1/2
    guess = np.cos(np.pi * (4 * j - 1 + 2 * jb) / (4 * m + 4 * jb + 2))
    x, it, step = _newton(n, m, guess)
    if _valid(x):
        return x
    # large (n-1)/2 pushes the cosine guesses out of the basins; eigenvalue guesses instead
    x2, it2, step2 = _newton(n, m, _golub_welsch_guess(n, m))
    if _valid(x2):
        return x2
    raise QuadratureError(
        f"Gauss nodes for n={n}, m={m} not found: cosine start stopped after {it} "
        f"iterations (last max|dx| = {step:.3e}), eigenvalue start after {it2} "
        f"iterations (last max|dx| = {step2:.3e})"
    )


@lru_cache(maxsize=None)
def quadrature_rule(n: int, m: int) -> QuadratureRule:
    """m-point Gauss rule for the weight (1-t^2)^{(n-2)/2} on [-1, 1].

    n = 1 is the closed-form Chebyshev-Gauss rule; n >= 2 uses Newton on the
    recurrence with cosine initial guesses.
    """
    if n < 1 or m < 2:
        raise ValueError("need n >= 1 and m >= 2")
    if n == 1:
        j = np.arange(1, m + 1)
        nodes = np.sort(np.cos((2 * j - 1) * np.pi / (2 * m)))
        weights = np.full(m, np.pi / m)
    else:
        a = _alpha(n)
        nodes = _newton_roots(n, m)
        tab = gegenbauer_table(n, m, nodes)
        dp = ((m + 2 * a - 1) * tab[m - 1] - m * nodes * tab[m]) / ((1 - nodes) * (1 + nodes))
        log_c = (
            math.log(math.pi)
            + (2 - 2 * a) * math.log(2)
            + math.lgamma(m + 2 * a)
            - math.lgamma(m + 1)
            - 2 * math.lgamma(a)
        )
        weights = np.exp(log_c) / ((1 - nodes) * (1 + nodes) * dp**2)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(n, m, nodes, weights)


def _check_n(n: int):
    if n < 2:
        raise ValueError("closed-form monomial coefficients need n >= 2")


def monomial_even_coeffs(n: int, K: int) -> GegenbauerCoeffs:
    """Coefficients c_k with t^{2K} = sum_k c_k C_{2k}^{((n-1)/2)}(t)."""
    _check_n(n)
    a = _alpha(n)
    vals = []
    for k in range(K + 1):
        log_mag = (
            -2 * K * math.log(2)
            + math.lgamma(2 * K + 1)
            + math.lgamma(a)
            - math.lgamma(K + k + (n + 1) / 2)
            - math.lgamma(K - k + 1)
        )
        vals.append((2 * k + a) * math.exp(log_mag))
    return GegenbauerCoeffs(n, tuple(2 * k for k in range(K + 1)), tuple(vals))


def monomial_odd_coeffs(n: int, K: int) -> GegenbauerCoeffs:
    """Coefficients d_k with t^{2K+1} = sum_k d_k C_{2k+1}^{((n-1)/2)}(t)."""
    _check_n(n)
    a = _alpha(n)
    vals = []
    for k in range(K + 1):
        log_mag = (
            -(2 * K + 1) * math.log(2)
            + math.lgamma(2 * K + 2)
            + math.lgamma(a)
            - math.lgamma(K + k + (n + 3) / 2)
            - math.lgamma(K - k + 1)
        )
        vals.append((2 * k + (n + 1) / 2) * math.exp(log_mag))
    return GegenbauerCoeffs(n, tuple(2 * k + 1 for k in range(K + 1)), tuple(vals))


def coeff_ratio(n: int, K: int, k: int) -> Fraction:
    """d_k / c_k = (2K+1)(4k+n+1) / ((2K+2k+n+1)(4k+n-1)), exactly."""
    return Fraction((2 * K + 1) * (4 * k + n + 1), (2 * K + 2 * k + n + 1) * (4 * k + n - 1))


def norm_ratio(n: int, k: int) -> Fraction:
    """||C_{2k+1}||^2 / ||C_{2k}||^2 = (2k+n-1)(4k+n-1) / ((2k+1)(4k+n+1)), exactly."""
    return Fraction((2 * k + n - 1) * (4 * k + n - 1), (2 * k + 1) * (4 * k + n + 1))
