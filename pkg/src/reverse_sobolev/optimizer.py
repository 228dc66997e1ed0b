"""Derivative-free minimization of the conformal quotient over positive zonal
functions, and the u + eps descent curves.

Profiles are parametrized as u = exp(v), with v a band-limited zonal function
given by its coefficients in an orthonormal Gegenbauer basis, so positivity
holds by construction. The scaling gauge is fixed by max u = 1 on the grid.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import optimize

from .functional import (
    FunctionalReport,
    even_test_function,
    odd_test_function,
    quotient,
)
from .gegenbauer import gegenbauer_norms, gegenbauer_table, quadrature_rule
from .serialization import decode_ext, encode_ext, format_ext, format_float
from .special import Regime, SpectralParams, instability_case, multipliers, sphere_volume
from .zonal import from_samples, _analysis_matrix

INITS = ("constant", "perturbed-constant", "equality-profile", "custom")
# an accepted step must lower the quotient by this relative amount
MIN_DECREASE = 1e-14


@dataclass(frozen=True)
class MinimizeConfig:
    L_max: int = 32
    grid_order: int = 48
    max_iters: int = 400
    step_tolerance: float = 1e-6
    seed: int = 42
    init: str = "perturbed-constant"
    zeta: float = 0.0
    custom: Callable | None = field(default=None, compare=False)
    v_degree: int = 8
    amplitude: float = 0.2
    perturb_degrees: tuple[int, ...] | None = None
    random_directions: int = 8
    initial_step: float = 0.1
    floor: float | None = None
    max_residual: float = 1e-10

    def __post_init__(self):
        if self.grid_order < self.L_max + 8:
            raise ValueError("grid_order must be at least L_max + 8")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.init not in INITS:
            raise ValueError(f"init must be one of {INITS}")
        if self.init == "custom" and self.custom is None:
            raise ValueError("custom init needs a profile")
        if not 1 <= self.v_degree <= self.L_max:
            raise ValueError("v_degree must lie in [1, L_max]")
        if not abs(self.zeta) < 1:
            raise ValueError("need |zeta| < 1")


@dataclass(frozen=True)
class Iterate:
    iteration: int
    quotient: float
    a_value: float
    integral: float


@dataclass(frozen=True)
class DescentTrace:
    iterates: tuple[Iterate, ...]
    best: FunctionalReport
    converged: bool
    coeffs: tuple[float, ...] = ()

    def to_dict(self) -> dict:
        return {
            "iterates": [
                {"iteration": it.iteration, "quotient": encode_ext(it.quotient),
                 "a_value": encode_ext(it.a_value), "integral": encode_ext(it.integral)}
                for it in self.iterates
            ],
            "best": self.best.to_dict(),
            "converged": self.converged,
            "coeffs": list(self.coeffs),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DescentTrace":
        its = tuple(
            Iterate(int(x["iteration"]), decode_ext(x["quotient"]), decode_ext(x["a_value"]),
                    decode_ext(x["integral"]))
            for x in d["iterates"]
        )
        return cls(its, FunctionalReport.from_dict(d["best"]), bool(d["converged"]),
                   tuple(float(c) for c in d.get("coeffs", ())))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["iteration", "quotient", "a_value", "integral"])
        for it in self.iterates:
            w.writerow([it.iteration, format_ext(it.quotient), format_ext(it.a_value), format_ext(it.integral)])
        return buf.getvalue()


class _Objective:
    """Quotient of exp(v) with the negative-power integral done on the Gauss grid
    (the integrand is smooth and positive for every admissible v)."""

    def __init__(self, p: SpectralParams, cfg: MinimizeConfig):
        self.p = p
        self.cfg = cfg
        n = p.n
        self.rule = quadrature_rule(n, cfg.grid_order)
        area = sphere_volume(n - 1)
        # orthonormal zonal basis on S^n evaluated at the grid
        self.basis = gegenbauer_table(n, cfg.v_degree, self.rule.nodes) / np.sqrt(
            area * gegenbauer_norms(n, cfg.v_degree)
        )[:, None]
        self.phi0 = float(self.basis[0, 0])
        self.analysis = _analysis_matrix(n, cfg.grid_order)
        m = cfg.grid_order
        self.weights_l2 = area * gegenbauer_norms(n, m - 1)
        self.alpha = multipliers(p, cfg.L_max)
        self.area = area

    def values(self, b: np.ndarray) -> np.ndarray:
        return np.exp(b @ self.basis)

    def gauge(self, b: np.ndarray) -> np.ndarray:
        b = b.copy()
        b[0] -= np.max(b @ self.basis) / self.phi0
        return b

    def __call__(self, b: np.ndarray):
        u = self.values(b)
        if not np.all(np.isfinite(u)) or np.any(u <= 0):
            return None
        full = self.analysis @ u
        energy = full**2 * self.weights_l2
        total = float(energy.sum())
        L = self.cfg.L_max
        if total <= 0 or float(energy[L + 1:].sum()) > self.cfg.max_residual * total:
            return None
        a = float(self.alpha @ energy[: L + 1])
        integral = self.area * self.rule.integrate(u ** (-self.p.neg_exponent))
        q = a * integral ** self.p.integral_power
        if not math.isfinite(q):
            return None
        return q, a, integral


def _orthonormal_coeffs(obj: _Objective, profile) -> np.ndarray:
    """Coefficients of log(profile) in the orthonormal basis, up to v_degree."""
    vals = np.asarray(profile(obj.rule.nodes), dtype=float)
    vals = np.broadcast_to(vals, obj.rule.nodes.shape)
    if np.any(vals <= 0) or not np.all(np.isfinite(vals)):
        raise ValueError("initial profile must be positive and finite on the grid")
    # Gauss projection against the orthonormal basis
    return obj.basis @ (obj.rule.weights * obj.area * np.log(vals))


def initial_coeffs(p: SpectralParams, cfg: MinimizeConfig, obj: _Objective | None = None) -> np.ndarray:
    obj = _Objective(p, cfg) if obj is None else obj
    b = np.zeros(cfg.v_degree + 1)
    if cfg.init == "perturbed-constant":
        rng = np.random.default_rng(cfg.seed)
        degrees = range(1, cfg.v_degree + 1) if cfg.perturb_degrees is None else cfg.perturb_degrees
        for ell in degrees:
            if not 1 <= ell <= cfg.v_degree:
                raise ValueError(f"perturbation degree {ell} outside 1..{cfg.v_degree}")
            b[ell] = cfg.amplitude * rng.standard_normal()
    elif cfg.init == "equality-profile":
        delta = p.excess
        b = _orthonormal_coeffs(obj, lambda t: (1 - cfg.zeta * t) ** delta)
    elif cfg.init == "custom":
        b = _orthonormal_coeffs(obj, cfg.custom)
    return obj.gauge(b)


def _directions(cfg: MinimizeConfig) -> np.ndarray:
    dim = cfg.v_degree + 1
    coord = np.eye(dim)[1:]
    rng = np.random.default_rng(cfg.seed + 1)
    rand = rng.standard_normal((cfg.random_directions, dim))
    rand[:, 0] = 0.0
    rand /= np.linalg.norm(rand, axis=1, keepdims=True)
    return np.vstack([coord, rand])


def minimize_quotient(p: SpectralParams, cfg: MinimizeConfig = MinimizeConfig()) -> DescentTrace:
    """Pattern search over the coefficients of v = log u.

    Each sweep tries +-h along the coordinate directions of degrees >= 1 and
    a fixed set of random directions, taking every step that lowers the
    quotient; a sweep without progress halves h. Stops when h drops below
    ``step_tolerance``, when ``floor`` is crossed, or after ``max_iters`` sweeps.
    """
    if p.regime is Regime.INTEGER_FAMILY:
        raise ValueError("minimization needs a non-integer s - n/2")
    obj = _Objective(p, cfg)
    b = initial_coeffs(p, cfg, obj)
    cur = obj(b)
    if cur is None:
        raise ValueError("initial profile is not resolved at this band limit")
    dirs = _directions(cfg)
    h = cfg.initial_step
    iterates = [Iterate(0, *cur)]
    converged = False
    for sweep in range(1, cfg.max_iters + 1):
        moved = False
        for d in dirs:
            for sign in (1.0, -1.0):
                trial = b + sign * h * d
                res = obj(trial)
                if res is not None and res[0] < cur[0] - MIN_DECREASE * abs(cur[0]):
                    b, cur, moved = obj.gauge(trial), res, True
                    break
        iterates.append(Iterate(sweep, *cur))
        if cfg.floor is not None and cur[0] < cfg.floor:
            break
        if not moved:
            h /= 2
            if h < cfg.step_tolerance:
                converged = True
                break
    best = quotient(final_profile(p, cfg, b, obj), p, cfg.max_residual)
    return DescentTrace(tuple(iterates), best, converged, tuple(map(float, b)))


def final_profile(p: SpectralParams, cfg: MinimizeConfig, b, obj: _Objective | None = None):
    obj = _Objective(p, cfg) if obj is None else obj
    b = np.asarray(b, dtype=float)
    basis_deg = cfg.v_degree
    area = obj.area
    norms = np.sqrt(area * gegenbauer_norms(p.n, basis_deg))

    def closure(t):
        t = np.asarray(t, dtype=float)
        return np.exp((b / norms) @ gegenbauer_table(p.n, basis_deg, t))

    return from_samples(p.n, obj.values(b), obj.rule, cfg.L_max, closure=closure)


def fit_equality_profile(u, p: SpectralParams, samples: int = 401) -> tuple[float, float, float]:
    """Best (zeta, c, sup distance) with u ~ c (1 - zeta t)^{(2s-n)/2}, both sides
    normalized to max 1."""
    t = np.linspace(-1, 1, samples)
    vals = np.asarray(u.evaluate(t))
    peak = float(np.max(vals))
    target = vals / peak
    delta = p.excess

    def dist(z):
        e = (1 - z * t) ** delta
        return float(np.max(np.abs(target - e / np.max(e))))

    grid = np.linspace(-0.98, 0.98, 99)
    z0 = grid[int(np.argmin([dist(z) for z in grid]))]
    res = optimize.minimize_scalar(dist, bounds=(max(z0 - 0.02, -0.999), min(z0 + 0.02, 0.999)),
                                   method="bounded", options={"xatol": 1e-10})
    z = float(res.x)
    e = (1 - z * t) ** delta
    return z, peak / float(np.max(e)), dist(z)


def descent_curve(p: SpectralParams, K: int, eps_list) -> list[tuple[float, float]]:
    """quotient(u + eps) for the negative test function u of the matching parity."""
    if p.regime is not Regime.NOT_ATTAINED:
        raise ValueError(f"descent curves need the NotAttained regime, got {p.regime}")
    parity, K_expected = instability_case(p)
    if K != K_expected or K < 1:
        raise ValueError(f"K incompatible with (n,s): expected K={K_expected} ({parity} case)")
    eps = [float(e) for e in eps_list]
    if not eps or any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("eps values must be positive and strictly decreasing")
    u = even_test_function(p.n, K) if parity == "even" else odd_test_function(p.n, K)
    out = []
    for e in eps:
        rep = quotient(u.shifted(e), p)
        out.append((e, float(rep.quotient)))
    return out


def descent_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["eps", "quotient"])
    for e, q in rows:
        w.writerow([format_float(e), format_float(q)])
    return buf.getvalue()
