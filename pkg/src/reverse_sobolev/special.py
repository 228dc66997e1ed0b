"""Gamma-function machinery, spectral multipliers, sphere volumes and regimes.

Everything here is a pure function of ``(n, s)``. Gamma ratios are carried as
``(log|value|, sign)`` pairs so that large arguments never overflow.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

POLE_TOL = 1e-9

# math.gamma overflows just above 171.6
_DIRECT_GAMMA_LIMIT = 170.0


class Regime(enum.Enum):
    ATTAINED_CONFORMAL = "AttainedConformal"
    INTEGER_FAMILY = "IntegerFamily"
    NOT_ATTAINED = "NotAttained"

    def __str__(self) -> str:
        return self.value


def is_nonpositive_integer(x: float, tol: float = POLE_TOL) -> bool:
    """True when ``x`` lies within ``tol`` of {0, -1, -2, ...}."""
    return x <= tol and abs(x - round(x)) <= tol


def _near_positive_integer(x: float, tol: float = POLE_TOL) -> bool:
    return x >= 1 - tol and abs(x - round(x)) <= tol


@dataclass(frozen=True)
class SpectralParams:
    """Dimension ``n`` of the sphere and order ``s`` of the operator (s > n/2)."""

    n: int
    s: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"parameter out of range: n must be an integer >= 1, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "s", float(self.s))
        if not math.isfinite(self.s) or self.s - self.n / 2 <= POLE_TOL:
            raise ValueError(f"parameter out of range: need s > n/2, got n={self.n}, s={self.s}")

    @property
    def excess(self) -> float:
        """s - n/2, the distance above the critical order."""
        return self.s - self.n / 2

    @property
    def neg_exponent(self) -> float:
        """The power 2n/(2s-n) in the integral of u^{-2n/(2s-n)}."""
        return 2 * self.n / (2 * self.s - self.n)

    @property
    def integral_power(self) -> float:
        """(2s-n)/n, the power applied to the negative-power integral in the quotient."""
        return (2 * self.s - self.n) / self.n

    @property
    def regime(self) -> Regime:
        return regime_classify(self)


@dataclass(frozen=True)
class SignedLogValue:
    log_abs: float
    sign: int

    @property
    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_abs)

    def __float__(self) -> float:
        return self.value


def log_gamma(x: float) -> tuple[float, int]:
    """Return ``(log|Gamma(x)|, sign Gamma(x))``.

    Negative non-integer arguments go through the reflection formula
    Gamma(x) Gamma(1-x) = pi / sin(pi x).
    """
    if is_nonpositive_integer(x):
        raise ValueError(f"Gamma has a pole at {x!r}")
    if x > 0:
        return math.lgamma(x), 1
    # sin(pi x) = (-1)^k sin(pi (x - k)); x - k is exact, so this stays accurate near poles
    k = round(x)
    sin_pi_x = (-1) ** (k % 2) * math.sin(math.pi * (x - k))
    log_abs = math.log(math.pi) - math.log(abs(sin_pi_x)) - math.lgamma(1.0 - x)
    return log_abs, (1 if sin_pi_x > 0 else -1)


def gamma_ratio(a: float, b: float) -> SignedLogValue:
    """Gamma(a)/Gamma(b) in signed-log form; a pole of the denominator gives 0."""
    num_pole = is_nonpositive_integer(a)
    den_pole = is_nonpositive_integer(b)
    if num_pole and den_pole:
        raise ValueError(f"indeterminate ratio: Gamma({a})/Gamma({b})")
    if num_pole:
        raise ValueError(f"numerator pole: Gamma({a})")
    if den_pole:
        return SignedLogValue(-math.inf, 0)
    la, sa = log_gamma(a)
    lb, sb = log_gamma(b)
    return SignedLogValue(la - lb, sa * sb)


def gamma_ratio_value(a: float, b: float) -> float:
    """Gamma(a)/Gamma(b) as a float.

    Uses ``math.gamma`` directly while both arguments are small enough not to
    overflow (a few ulps better than differencing log-gammas), otherwise falls
    back to :func:`gamma_ratio`.
    """
    ratio = gamma_ratio(a, b)
    if ratio.sign == 0:
        return 0.0
    if abs(a) < _DIRECT_GAMMA_LIMIT and abs(b) < _DIRECT_GAMMA_LIMIT:
        ga, gb = math.gamma(a), math.gamma(b)
        if ga != 0.0 and math.isfinite(ga) and math.isfinite(gb):
            return ga / gb
    return ratio.value


def multiplier(p: SpectralParams, ell: int) -> float:
    """Eigenvalue Gamma(l + n/2 + s) / Gamma(l + n/2 - s) of A_2s on degree-l harmonics."""
    if ell < 0:
        raise ValueError("degree must be nonnegative")
    return gamma_ratio_value(ell + p.n / 2 + p.s, ell + p.n / 2 - p.s)


@lru_cache(maxsize=256)
def _multiplier_table(n: int, s: float, L: int) -> np.ndarray:
    p = SpectralParams(n, s)
    out = np.array([multiplier(p, ell) for ell in range(L + 1)])
    out.setflags(write=False)
    return out


def multipliers(p: SpectralParams, L: int) -> np.ndarray:
    """Multipliers for degrees 0..L (read-only array)."""
    return _multiplier_table(p.n, p.s, int(L))


def sphere_volume(n: int) -> float:
    """Surface measure of S^n, 2 pi^{(n+1)/2} / Gamma((n+1)/2); |S^0| = 2."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return 2.0 * math.pi ** ((n + 1) / 2) / math.gamma((n + 1) / 2)


def sharp_constant(p: SpectralParams) -> float:
    """S_{s,n} = Gamma((n+2s)/2)/Gamma((n-2s)/2) |S^n|^{2s/n}."""
    ratio = gamma_ratio_value((p.n + 2 * p.s) / 2, (p.n - 2 * p.s) / 2)
    return ratio * sphere_volume(p.n) ** (2 * p.s / p.n)


def regime_classify(p: SpectralParams) -> Regime:
    """Which of the two main theorems governs (n, s).

    s - n/2 within POLE_TOL of a positive integer is snapped to the integer
    family. Note (n+2)/2 = n/2 + 1 always lands there, so the point excluded
    from the conformal branch never needs a separate verdict.
    """
    d = p.excess
    if _near_positive_integer(d):
        return Regime.INTEGER_FAMILY
    if d < 2:
        return Regime.ATTAINED_CONFORMAL
    return Regime.NOT_ATTAINED


def instability_case(p: SpectralParams) -> tuple[str, int]:
    """Return ``("even", K)`` if 2K < s-n/2 < 2K+1, ``("odd", K)`` if 2K+1 < s-n/2 < 2K+2.

    Raises for s - n/2 at an integer.
    """
    d = p.excess
    if abs(d - round(d)) <= POLE_TOL:
        raise ValueError(f"s - n/2 = {d} is an integer; no instability case")
    m = math.floor(d)
    return ("even", m // 2) if m % 2 == 0 else ("odd", (m - 1) // 2)
