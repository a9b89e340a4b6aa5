from __future__ import annotations
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb, factorial
from typing import Dict, List, Tuple
import logging

import numpy as np

from .quadrature import QuadratureGrid, gauss_chebyshev
from .schema import AnalyticMode, AnalyticRequest, DerivedThresholds, ScenarioParams, SchemeId
from .validators import clamp_probability

log = logging.getLogger("sgf")

# Direct enumeration of the tail H-terms stays cheap up to these sizes.
MAX_COMPOSITION_K = 5
MAX_COMPOSITION_L = 10

# Closed-form values whose rounding noise exceeds this share of the result are flagged.
CANCELLATION_TOLERANCE = 1e-2


# ───────────────────────────────────────────────────────────
# Multinomial compositions for the tail H-terms
# ───────────────────────────────────────────────────────────

@lru_cache(maxsize=None)
def compositions(total: int, parts: int) -> Tuple[np.ndarray, np.ndarray]:
    """Every (p_0, ..., p_{parts-1}) with sum `total`, and its multinomial coefficient."""
    rows = [
        np.bincount(np.asarray(combo, dtype=int), minlength=parts)
        for combo in combinations_with_replacement(range(parts), total)
    ]
    counts = np.array(rows, dtype=int).reshape(-1, parts)
    multinomial = np.array(
        [factorial(total) // int(np.prod([factorial(int(p)) for p in row])) for row in counts],
        dtype=float,
    )
    return counts, multinomial


def _composition_terms(grid: QuadratureGrid, total: int) -> Tuple[np.ndarray, np.ndarray]:
    """(coefficient, exponent) per composition: multinomial * prod Psi^p and sum p mu, over l = 0..L."""
    counts, multinomial = compositions(total, grid.L + 1)
    coef = multinomial * np.prod(np.power(grid.psi_ext, counts), axis=1)
    return coef, counts @ grid.mu_ext


def _composition_limit_exceeded(params: ScenarioParams, grid: QuadratureGrid) -> bool:
    return params.K > MAX_COMPOSITION_K or grid.L > MAX_COMPOSITION_L


# ───────────────────────────────────────────────────────────
# BU-SGF: G-terms, I-terms and the tail H-terms
# ───────────────────────────────────────────────────────────

def _sic_threshold_gain(w: np.ndarray, th: DerivedThresholds, power: float) -> np.ndarray:
    """(w / alpha_B - 1) / P: largest GF gain still decoded at the second stage."""
    return np.maximum(w / th.alpha_B - 1.0, 0.0) / power


def _first_stage_target(w: np.ndarray, params: ScenarioParams, th: DerivedThresholds) -> np.ndarray:
    """alpha_F (P_B w + 1): GF gain meeting R_F against the GB interference."""
    return th.alpha_F * (params.P_B * w + 1.0)


def h_term(params: ScenarioParams, grid: QuadratureGrid, k: int) -> float:
    """Closed-form tail H_{2;k} (fixed power, gamma_B gamma_F >= 1), exponents combined so none grows."""
    K = params.K
    th = params.thresholds()
    P_F, P_B, gF = params.P_F, params.P_B, params.gamma_F
    free = K - k
    c = grid.c[None, None, :]
    wc = (grid.w_B * grid.c)[None, None, :]
    total = 0.0
    for m in range(free + 1):
        cp, A = _composition_terms(grid, free - m)
        cq, B = _composition_terms(grid, m)
        A = A[:, None, None]
        B = B[None, :, None]
        lam = A * th.alpha_F * P_B + B / (P_F * th.alpha_B) + c
        expo = -B * gF / P_F - A * th.alpha_F * (1.0 + P_B * th.alpha_1) - c * th.alpha_1
        terms = cp[:, None, None] * cq[None, :, None] * wc * np.exp(expo) / lam
        total += comb(free, m) * (-1) ** m * float(terms.sum())
    return float((-0.5) ** free * grid.gf_cdf(th.alpha_F) ** k * total)


def bu_terms(params: ScenarioParams, grid: QuadratureGrid, power_control: bool = False) -> Dict[str, object]:
    """
    Per-k building blocks of the BU outage.

    Keys: G1 (list over k), G3, and then either G2 + I4 (sub-unity), H2 (super-unity)
    or I5 (power control, no regime split).
    """
    K = params.K
    th = params.thresholds(power_control)
    power = params.gf_power(power_control)

    def g1(k: int):
        def fn(w):
            a = _sic_threshold_gain(w, th, power)
            b = _first_stage_target(w, params, th)
            return grid.gb_pdf(w) * grid.gf_cdf(a) ** k * grid.gf_increment(a, b) ** (K - k)
        return fn

    def g3(w):
        return grid.gb_pdf(w) * grid.gf_cdf(_first_stage_target(w, params, th)) ** K

    out: Dict[str, object] = {
        "G1": [gauss_chebyshev(g1(k), th.alpha_B, th.alpha_1, grid.I) for k in range(K + 1)],
        "G3": gauss_chebyshev(g3, 0.0, th.alpha_B, grid.M),
    }
    f_alpha_F = float(grid.gf_cdf(th.alpha_F))

    if power_control:
        out["I5"] = float(grid.gb_sf(th.alpha_1)) * f_alpha_F ** K
        return out

    if th.alpha_2 is not None:
        def g2(k: int):
            def fn(w):
                a = _sic_threshold_gain(w, th, power)
                b = _first_stage_target(w, params, th)
                return grid.gb_pdf(w) * f_alpha_F ** k * grid.gf_increment(a, np.maximum(a, b)) ** (K - k)
            return fn
        out["G2"] = [gauss_chebyshev(g2(k), th.alpha_1, th.alpha_2, grid.J) for k in range(K + 1)]
        out["I4"] = float(grid.gb_sf(th.alpha_2)) * f_alpha_F ** K
        return out

    if _composition_limit_exceeded(params, grid):
        from .oracle import GridDistributions, bu_tail_integral
        log.warning(
            f"[sgf] K={K}, L={grid.L} beyond direct composition sums; integrating the BU tail numerically"
        )
        dist = GridDistributions(grid)
        out["H2"] = [bu_tail_integral(params, dist, k).value for k in range(K + 1)]
    else:
        out["H2"] = [h_term(params, grid, k) for k in range(K + 1)]
    return out


def _eta(K: int) -> np.ndarray:
    return np.array([comb(K, k) for k in range(K + 1)], dtype=float)


def _require_multi_user(params: ScenarioParams, name: str) -> None:
    if params.K < 2:
        raise ValueError(
            f"{name} needs K >= 2 (got K={params.K}); single-user outage is evaluated with the CS form at K = 1"
        )


def outage_bu(params: ScenarioParams, grid: QuadratureGrid) -> float:
    _require_multi_user(params, "outage_bu")
    t = bu_terms(params, grid)
    eta = _eta(params.K)
    value = float(eta @ np.asarray(t["G1"])) + float(t["G3"])
    if "G2" in t:
        value += float(eta @ np.asarray(t["G2"])) + float(t["I4"])
    else:
        value += float(eta @ np.asarray(t["H2"]))
    return clamp_probability(value, "outage_bu")


def outage_bu_pc(params: ScenarioParams, grid: QuadratureGrid) -> float:
    _require_multi_user(params, "outage_bu_pc")
    t = bu_terms(params, grid, power_control=True)
    value = float(_eta(params.K) @ np.asarray(t["G1"])) + float(t["G3"]) + float(t["I5"])
    return clamp_probability(value, "outage_bu_pc")


# ───────────────────────────────────────────────────────────
# CS-SGF: exponential sums over (l, k, n)
# ───────────────────────────────────────────────────────────

def _lkn(params: ScenarioParams, grid: QuadratureGrid):
    """Broadcast axes l, k, n and the coefficient 1/2 Psi_l C(K,k) (-1)^k Phi_n/(D_0+D_1)."""
    K = params.K
    k = np.arange(K + 1, dtype=float)[None, :, None]
    mu = grid.mu[:, None, None]
    c = grid.c[None, None, :]
    signed = np.array([comb(K, j) * (-1) ** j for j in range(K + 1)], dtype=float)[None, :, None]
    coef = 0.5 * grid.psi[:, None, None] * signed * grid.w_B[None, None, :]
    return k, mu, c, coef


def _capture_term(params: ScenarioParams, grid: QuadratureGrid, alpha_1: float, target: float) -> float:
    """1/2 sum Psi w_B e^{-c alpha_1} (1 - e^{-mu target})^K: GB gain above alpha_1, GF gain below target."""
    gf = (-np.expm1(-grid.mu * target)) ** params.K
    gb = grid.w_B * np.exp(-grid.c * alpha_1)
    return float(0.5 * np.sum(grid.psi * gf) * np.sum(gb))


def _cs_arrays(params: ScenarioParams, grid: QuadratureGrid) -> Tuple[np.ndarray, np.ndarray, float, float]:
    """Summands of the CS outage, plus the absolute size of what the correction differences are formed from."""
    th = params.thresholds()
    k, mu, c, coef = _lkn(params, grid)
    P_B, P_F = params.P_B, params.P_F

    theta1 = k * mu * P_B * th.alpha_F + c
    capture = coef * c / theta1 * np.exp(-k * mu * th.alpha_F)
    if th.alpha_2 is not None:
        capture = capture * -np.expm1(-theta1 * th.alpha_2)

    theta2 = k * mu / (P_F * th.alpha_B) + c

    def shifted(alpha: float) -> np.ndarray:
        # e^{k mu / P_F} e^{-Theta_2 alpha}, combined
        return np.exp(k * mu / P_F * (1.0 - alpha / th.alpha_B) - c * alpha)

    scale = coef * c / theta2
    if th.alpha_2 is not None:
        upper, lower = shifted(th.alpha_2), shifted(th.alpha_1)
        correction = scale * (upper - lower)
        magnitude = np.abs(scale) * (upper + lower)
    else:
        correction = -scale * shifted(th.alpha_1)
        magnitude = np.abs(correction)

    tail = _capture_term(params, grid, th.alpha_1, th.alpha_F)
    return capture, correction, tail, float(np.abs(capture).sum() + magnitude.sum() + tail)


def _check_cancellation(value: float, magnitude: float, source: str) -> None:
    """Warn when the alternating sums leave `value` at the rounding level of their summands."""
    noise = np.finfo(float).eps * magnitude
    if noise > CANCELLATION_TOLERANCE * abs(value):
        log.warning(
            f"[sgf] {source}: result {value:.3e} is within rounding of its summands "
            f"(size {magnitude:.3e}); use the high-snr or oracle mode at this SNR"
        )


def cs_terms(params: ScenarioParams, grid: QuadratureGrid) -> Dict[str, float]:
    """The three sums of the CS outage: first-stage failures, the second-stage correction, and the tail above alpha_1."""
    capture, correction, tail, _ = _cs_arrays(params, grid)
    return {
        "first_stage": float(capture.sum()),
        "correction": float(correction.sum()),
        "tail": tail,
    }


def outage_cs(params: ScenarioParams, grid: QuadratureGrid) -> float:
    capture, correction, tail, magnitude = _cs_arrays(params, grid)
    value = float(capture.sum()) + float(correction.sum()) + tail
    _check_cancellation(value, magnitude, "outage_cs")
    return clamp_probability(value, "outage_cs")


def outage_cs_pc(params: ScenarioParams, grid: QuadratureGrid) -> float:
    th = params.thresholds(power_control=True)
    k, mu, c, coef = _lkn(params, grid)
    theta1 = k * mu * params.P_B * th.alpha_F + c
    first = coef * c / theta1 * np.exp(-k * mu * th.alpha_F) * -np.expm1(-theta1 * th.alpha_1)
    tail = _capture_term(params, grid, th.alpha_1, th.alpha_F)
    value = float(first.sum()) + tail
    _check_cancellation(value, float(np.abs(first).sum()) + tail, "outage_cs_pc")
    return clamp_probability(value, "outage_cs_pc")


# ───────────────────────────────────────────────────────────
# Diversity and request routing
# ───────────────────────────────────────────────────────────

def diversity_order(params: ScenarioParams, scheme: SchemeId | str) -> int:
    """K with power control or gamma_B gamma_F < 1; 0 (error floor) otherwise. RS behaves as K = 1."""
    scheme = SchemeId(scheme)
    if scheme.fsic:
        return 0
    order = 1 if scheme.rule == "RS" else params.K
    if scheme.power_control or params.regime().sub_unity:
        return order
    return 0


def single_user_equivalent(scheme: SchemeId, params: ScenarioParams) -> Tuple[SchemeId, ScenarioParams]:
    """RS for any K, and every rule at K = 1, evaluate as CS with one user."""
    if scheme.rule == "RS" or params.K == 1:
        cs = SchemeId.CS_PC if scheme.power_control else SchemeId.CS
        return cs, ScenarioParams(**{**params.model_dump(), "K": 1})
    return scheme, params


_EXACT = {
    SchemeId.BU: outage_bu,
    SchemeId.BU_PC: outage_bu_pc,
    SchemeId.CS: outage_cs,
    SchemeId.CS_PC: outage_cs_pc,
}


def evaluate(request: AnalyticRequest) -> float:
    """Route a request to its evaluator."""
    from . import asymptotics
    from .oracle import numeric_oracle

    scheme = request.scheme
    grid = request.grid if request.grid is not None else QuadratureGrid.build(request.params)
    if request.mode is AnalyticMode.ORACLE:
        return numeric_oracle(scheme, request.params).value

    scheme, params = single_user_equivalent(scheme, request.params)
    if request.mode is AnalyticMode.EXACT:
        return _EXACT[scheme](params, grid)
    if request.mode is AnalyticMode.HIGH_SNR:
        return asymptotics.high_snr(scheme, params, grid)
    return asymptotics.dominant_term(scheme, params, grid)


def evaluate_many(schemes: List[SchemeId], params: ScenarioParams, grid: QuadratureGrid,
                  mode: AnalyticMode) -> Dict[SchemeId, float]:
    return {s: evaluate(AnalyticRequest(scheme=s, params=params, grid=grid, mode=mode)) for s in schemes}
