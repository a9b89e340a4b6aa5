"""
Adaptive numeric-integration oracle.

Outage probabilities are integrated directly from their pre-quadrature forms: an outer
integral over the GB gain |g|^2 of the per-user (or scheduled-user) failure probability.
The distance averages come from `ExactDistributions` (nested adaptive quadrature over the
radius) or, to check closed-form algebra in isolation, from `GridDistributions` (the
Gauss-Chebyshev forms of a QuadratureGrid).
"""
from __future__ import annotations
from functools import lru_cache
from typing import Callable, Dict, Optional
import logging
import warnings

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.integrate import IntegrationWarning, dblquad, quad

from .quadrature import QuadratureGrid
from .schema import FsicOrder, ScenarioParams, SchemeId
from .validators import clamp_probability

log = logging.getLogger("sgf")

INNER_EPSREL = 1e-10
OUTER_EPSREL = 1e-8
OUTER_EPSABS = 1e-12
QUAD_LIMIT = 200


class OracleResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: float
    abs_error: float
    converged: bool = True
    terms: Dict[str, float] = Field(default_factory=dict)


class _Tally:
    """Accumulates quad error estimates and convergence across a computation."""

    def __init__(self):
        self.abs_error = 0.0
        self.converged = True

    def quad(self, fn: Callable[[float], float], lower: float, upper: float) -> float:
        if upper <= lower:
            return 0.0
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", IntegrationWarning)
            value, err = quad(fn, lower, upper, epsabs=OUTER_EPSABS, epsrel=OUTER_EPSREL, limit=QUAD_LIMIT)
        if any(issubclass(w.category, IntegrationWarning) for w in caught):
            self.converged = False
        self.abs_error += float(err)
        return float(value)

    def result(self, value: float, source: str, terms: Optional[Dict[str, float]] = None) -> OracleResult:
        if not self.converged:
            log.warning(f"[sgf] {source}: adaptive integration did not converge (abs_error ~ {self.abs_error:.2e})")
        return OracleResult(
            value=float(clamp_probability(value, source)),
            abs_error=self.abs_error,
            converged=self.converged,
            terms=terms or {},
        )


# ───────────────────────────────────────────────────────────
# Distance-averaged channel distributions
# ───────────────────────────────────────────────────────────

class ExactDistributions:
    """Unordered GF / GB gain distributions, averaged over the radius by adaptive quadrature."""

    def __init__(self, params: ScenarioParams):
        self.params = params
        self.gf_cdf = lru_cache(maxsize=4096)(self._gf_cdf)
        self.gf_pdf = lru_cache(maxsize=4096)(self._gf_pdf)
        self.cs_cdf = lru_cache(maxsize=4096)(self._cs_cdf)
        self.gb_cdf = lru_cache(maxsize=4096)(self._gb_cdf)
        self.gb_sf = lru_cache(maxsize=4096)(self._gb_sf)
        self.gb_pdf = lru_cache(maxsize=4096)(self._gb_pdf)

    def _radial_mean(self, fn: Callable[[float], float], r_in: float, r_out: float) -> float:
        if r_in == r_out:
            return float(fn(r_out))
        norm = 2.0 / (r_out ** 2 - r_in ** 2)
        value, _ = quad(lambda r: fn(r) * r, r_in, r_out, epsabs=0.0, epsrel=INNER_EPSREL, limit=QUAD_LIMIT)
        return norm * value

    def _gf(self, fn: Callable[[float], float]) -> float:
        return self._radial_mean(fn, self.params.D_F_inner, self.params.D_F)

    def _gb(self, fn: Callable[[float], float]) -> float:
        return self._radial_mean(fn, self.params.D_0, self.params.D_1)

    def _rate(self, r: float) -> float:
        return 1.0 + r ** self.params.alpha

    def _gf_cdf(self, x: float) -> float:
        return self._gf(lambda r: -np.expm1(-self._rate(r) * x))

    def _gf_pdf(self, x: float) -> float:
        return self._gf(lambda r: self._rate(r) * np.exp(-self._rate(r) * x))

    def _cs_cdf(self, x: float, K: int) -> float:
        return self._gf(lambda r: (-np.expm1(-self._rate(r) * x)) ** K)

    def _gb_cdf(self, y: float) -> float:
        return self._gb(lambda r: -np.expm1(-self._rate(r) * y))

    def _gb_sf(self, y: float) -> float:
        return self._gb(lambda r: np.exp(-self._rate(r) * y))

    def _gb_pdf(self, y: float) -> float:
        return self._gb(lambda r: self._rate(r) * np.exp(-self._rate(r) * y))


class GridDistributions:
    """The same interface over a QuadratureGrid's closed forms."""

    def __init__(self, grid: QuadratureGrid):
        self.grid = grid

    def gf_cdf(self, x: float) -> float:
        return float(self.grid.gf_cdf(x))

    def gf_pdf(self, x: float) -> float:
        return float(self.grid.gf_pdf(x))

    def cs_cdf(self, x: float, K: int) -> float:
        return float(self.grid.cs_cdf(x, K))

    def gb_cdf(self, y: float) -> float:
        return float(self.grid.gb_cdf(y))

    def gb_sf(self, y: float) -> float:
        return float(self.grid.gb_sf(y))

    def gb_pdf(self, y: float) -> float:
        return float(self.grid.gb_pdf(y))


# ───────────────────────────────────────────────────────────
# Integral forms
# ───────────────────────────────────────────────────────────

def _window(params: ScenarioParams, power_control: bool):
    """(th, a(w), b(w)): second-stage ceiling and first-stage floor on the GF gain."""
    th = params.thresholds(power_control)
    power = params.gf_power(power_control)

    def a(w: float) -> float:
        return max(w / th.alpha_B - 1.0, 0.0) / power

    def b(w: float) -> float:
        return th.alpha_F * (params.P_B * w + 1.0)

    return th, a, b


def bu_integral_terms(params: ScenarioParams, dist, power_control: bool = False) -> OracleResult:
    """The BU building blocks (G1, G3, then G2+I4, H2 or I5), each integrated adaptively; value is their eta-weighted sum."""
    from .analytic import _eta

    K = params.K
    eta = _eta(K)
    th, a, b = _window(params, power_control)
    tally = _Tally()
    f_alpha_F = dist.gf_cdf(th.alpha_F)

    def inc(lo: float, hi: float) -> float:
        return max(dist.gf_cdf(hi) - dist.gf_cdf(lo), 0.0)

    terms: Dict[str, float] = {}
    for k in range(K + 1):
        terms[f"G1[{k}]"] = tally.quad(
            lambda w, k=k: dist.gb_pdf(w) * dist.gf_cdf(a(w)) ** k * inc(a(w), b(w)) ** (K - k),
            th.alpha_B, th.alpha_1,
        )
    terms["G3"] = tally.quad(lambda w: dist.gb_pdf(w) * dist.gf_cdf(b(w)) ** K, 0.0, th.alpha_B)
    value = float(eta @ np.array([terms[f"G1[{k}]"] for k in range(K + 1)])) + terms["G3"]

    if power_control:
        terms["I5"] = dist.gb_sf(th.alpha_1) * f_alpha_F ** K
        return tally.result(value + terms["I5"], "bu_integral_terms", terms)

    if th.alpha_2 is not None:
        for k in range(K + 1):
            terms[f"G2[{k}]"] = tally.quad(
                lambda w, k=k: dist.gb_pdf(w) * f_alpha_F ** k * inc(a(w), max(a(w), b(w))) ** (K - k),
                th.alpha_1, th.alpha_2,
            )
        terms["I4"] = dist.gb_sf(th.alpha_2) * f_alpha_F ** K
        value += float(eta @ np.array([terms[f"G2[{k}]"] for k in range(K + 1)])) + terms["I4"]
        return tally.result(value, "bu_integral_terms", terms)

    for k in range(K + 1):
        h = bu_tail_integral(params, dist, k)
        tally.abs_error += h.abs_error
        tally.converged &= h.converged
        terms[f"H2[{k}]"] = h.value
    value += float(eta @ np.array([terms[f"H2[{k}]"] for k in range(K + 1)]))
    return tally.result(value, "bu_integral_terms", terms)


def bu_tail_integral(params: ScenarioParams, dist, k: int) -> OracleResult:
    """H_{2;k}: integral over [alpha_1, inf) of f_B(w) F_F(alpha_F)^k (F_F(b) - F_F(a))^(K-k)."""
    th, a, b = _window(params, False)
    f_alpha_F = dist.gf_cdf(th.alpha_F)
    tally = _Tally()
    value = tally.quad(
        lambda w: dist.gb_pdf(w) * f_alpha_F ** k * max(dist.gf_cdf(b(w)) - dist.gf_cdf(a(w)), 0.0) ** (params.K - k),
        th.alpha_1, np.inf,
    )
    # not a probability on its own; skip clamping
    return OracleResult(value=value, abs_error=tally.abs_error, converged=tally.converged)


def cs_integral_terms(params: ScenarioParams, dist) -> OracleResult:
    """First-stage failures, second-stage correction and tail of the fixed-power CS outage, integrated adaptively."""
    th, a, b = _window(params, False)
    K = params.K
    tally = _Tally()
    upper = th.alpha_2 if th.alpha_2 is not None else np.inf
    terms = {
        "first_stage": tally.quad(lambda w: dist.gb_pdf(w) * dist.cs_cdf(b(w), K), 0.0, upper),
        "correction": -tally.quad(lambda w: dist.gb_pdf(w) * dist.cs_cdf(a(w), K), th.alpha_1, upper),
        "tail": dist.gb_sf(th.alpha_1) * dist.cs_cdf(th.alpha_F, K),
    }
    return tally.result(sum(terms.values()), "cs_integral_terms", terms)


def _failure_expectation(params: ScenarioParams, dist, power_control: bool,
                         fail: Callable[[float], float], tally: _Tally) -> float:
    """E over |g|^2 of fail(F-value), split at the stage boundaries."""
    th, a, b = _window(params, power_control)
    cdf = fail  # F-value -> failure probability of the scheduled user

    def first_only(w: float) -> float:
        return dist.gb_pdf(w) * cdf(b(w))

    value = tally.quad(first_only, 0.0, th.alpha_1)
    if power_control:
        return value + dist.gb_sf(th.alpha_1) * cdf(th.alpha_F)

    def hybrid(w: float) -> float:
        window = max(cdf(b(w)) - cdf(max(a(w), th.alpha_F)), 0.0)
        return dist.gb_pdf(w) * (cdf(th.alpha_F) + window)

    if th.alpha_2 is None:
        return value + tally.quad(hybrid, th.alpha_1, np.inf)
    value += tally.quad(hybrid, th.alpha_1, th.alpha_2)
    return value + dist.gb_sf(th.alpha_2) * cdf(th.alpha_F)


def _fsic_outage(params: ScenarioParams, dist, order: FsicOrder, tally: _Tally) -> float:
    th, a, b = _window(params, False)
    if FsicOrder(order) is FsicOrder.GF_FIRST:
        return tally.quad(lambda w: dist.gb_pdf(w) * dist.gf_cdf(b(w)), 0.0, np.inf)
    success = tally.quad(
        lambda w: dist.gb_pdf(w) * max(dist.gf_cdf(a(w)) - dist.gf_cdf(th.alpha_F), 0.0),
        th.alpha_1, np.inf,
    )
    return 1.0 - success


def numeric_oracle(scheme: SchemeId | str, params: ScenarioParams, distributions=None,
                   fsic_order: FsicOrder = FsicOrder.GF_FIRST) -> OracleResult:
    """
    Outage of any scheme by adaptive integration.

    BU: E_g[q(g)^K] with q the single-user failure probability. CS: E_g of the
    scheduled-user failure probability under F_F(x)^K averaged over distance. RS is CS
    with one user; RS-FSIC integrates the fixed decoding order directly.
    """
    scheme = SchemeId(scheme)
    dist = distributions if distributions is not None else ExactDistributions(params)
    tally = _Tally()
    pc = scheme.power_control

    if scheme.fsic:
        value = _fsic_outage(params, dist, fsic_order, tally)
    elif scheme.rule == "BU":
        th, a, b = _window(params, pc)
        K = params.K

        def per_user(w: float) -> float:
            q = dist.gf_cdf(b(w))
            if w >= th.alpha_1:
                # second stage open: gains in [alpha_F, a(w)] succeed as well
                q = dist.gf_cdf(th.alpha_F) + max(q - dist.gf_cdf(a(w)), 0.0)
            return dist.gb_pdf(w) * q ** K

        breaks = [0.0, th.alpha_B, th.alpha_1]
        if not pc and th.alpha_2 is not None:
            breaks.append(th.alpha_2)
        value = sum(tally.quad(per_user, lo, hi) for lo, hi in zip(breaks, breaks[1:]))
        if pc or th.alpha_2 is not None:
            value += dist.gb_sf(breaks[-1]) * dist.gf_cdf(th.alpha_F) ** K
        else:
            value += tally.quad(per_user, breaks[-1], np.inf)
    else:
        K = 1 if scheme.rule == "RS" else params.K
        value = _failure_expectation(params, dist, pc, lambda x: dist.cs_cdf(x, K), tally)

    return tally.result(value, f"numeric_oracle[{scheme.value}]")


# ───────────────────────────────────────────────────────────
# Order statistics of K i.i.d. GF gains
# ───────────────────────────────────────────────────────────

def joint_density_min_max(dist, K: int) -> Callable[[float, float], float]:
    """Joint density of (smallest, largest) gain: K(K-1) f(x) f(y) (F(y) - F(x))^(K-2) on x < y."""
    if K < 2:
        raise ValueError(f"joint order-statistic densities need K >= 2, got {K}")

    def density(x: float, y: float) -> float:
        if x >= y:
            return 0.0
        return K * (K - 1) * dist.gf_pdf(x) * dist.gf_pdf(y) * (dist.gf_cdf(y) - dist.gf_cdf(x)) ** (K - 2)

    return density


def joint_density_adjacent_max(dist, K: int) -> Callable[[float, float], float]:
    """Joint density of (second largest, largest): K(K-1) F(x)^(K-2) f(x) f(y) on x < y."""
    if K < 2:
        raise ValueError(f"joint order-statistic densities need K >= 2, got {K}")

    def density(x: float, y: float) -> float:
        if x >= y:
            return 0.0
        return K * (K - 1) * dist.gf_cdf(x) ** (K - 2) * dist.gf_pdf(x) * dist.gf_pdf(y)

    return density


def density_mass(density: Callable[[float, float], float], lower: float = 0.0,
                 upper: float = np.inf) -> OracleResult:
    """Integral of a joint density over lower <= x <= y <= upper."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", IntegrationWarning)
        value, err = dblquad(
            lambda x, y: density(x, y), lower, upper, lambda y: lower, lambda y: y,
            epsabs=1e-10, epsrel=1e-8,
        )
    converged = not any(issubclass(w.category, IntegrationWarning) for w in caught)
    return OracleResult(value=float(value), abs_error=float(err), converged=converged)


def min_max_window_mass(dist, K: int, a: float, b: float) -> OracleResult:
    """P(a <= min, max <= b) from the joint density, with (F(b) - F(a))^K under terms['closed_form']."""
    result = density_mass(joint_density_min_max(dist, K), a, b)
    closed = (dist.gf_cdf(b) - dist.gf_cdf(a)) ** K
    return result.model_copy(update={"terms": {"closed_form": float(closed)}})
