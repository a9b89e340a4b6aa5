"""
High-SNR forms of the outage probabilities, with P_B = P_F = P_m -> infinity.

`high_snr_*` keep every term up to order 1/P^(K+1); `dominant_*` keep only the
leading term, which fixes the diversity order. P_B serves as the SNR throughout.
"""
from __future__ import annotations
from math import comb
from typing import Callable, Dict

import numpy as np

from .analytic import _composition_terms, _eta, _require_multi_user
from .quadrature import QuadratureGrid
from .schema import ScenarioParams, SchemeId
from .validators import clamp_probability


def _alpha_tilde(params: ScenarioParams):
    gB, gF = params.gamma_B, params.gamma_F
    a1 = gB * (gF + 1.0)
    a2 = a1 / (1.0 - gB * gF) if gB * gF < 1.0 else None
    return a1, a2


def _bu_prefactor(params: ScenarioParams, grid: QuadratureGrid) -> float:
    return grid.S_B * grid.S_F ** params.K / params.P_B ** (params.K + 1)


def _linear_window(params: ScenarioParams, n_free: int):
    """Coefficients C(n,i) (gF+1)^(n-i) (gF - 1/gB)^i of the linearized F(b) - F(a)."""
    gB, gF = params.gamma_B, params.gamma_F
    return [(i, comb(n_free, i) * (gF + 1.0) ** (n_free - i) * (gF - 1.0 / gB) ** i) for i in range(n_free + 1)]


def ibar_1(params: ScenarioParams, grid: QuadratureGrid, k: int) -> float:
    K, gB, gF = params.K, params.gamma_B, params.gamma_F
    total = 0.0
    for i, coef in _linear_window(params, K - k):
        inner = sum(
            comb(k, j) * (-1) ** j * ((1.0 + gF) ** (k - j + i + 1) - 1.0) / (k - j + i + 1)
            for j in range(k + 1)
        )
        total += coef * gB ** (i + 1) * inner
    return _bu_prefactor(params, grid) * total


def ibar_2(params: ScenarioParams, grid: QuadratureGrid, k: int) -> float:
    a1, a2 = _alpha_tilde(params)
    total = sum(
        coef * params.gamma_F ** k * (a2 ** (i + 1) - a1 ** (i + 1)) / (i + 1)
        for i, coef in _linear_window(params, params.K - k)
    )
    return _bu_prefactor(params, grid) * total


def ibar_3(params: ScenarioParams, grid: QuadratureGrid) -> float:
    K = params.K
    return _bu_prefactor(params, grid) * params.gamma_F ** K * ((1.0 + params.gamma_B) ** (K + 1) - 1.0) / (K + 1)


def _leading_bu(params: ScenarioParams, grid: QuadratureGrid) -> float:
    return (grid.S_F * params.gamma_F / params.P_B) ** params.K


def hbar_2(params: ScenarioParams, grid: QuadratureGrid, k: int) -> float:
    """Limit of the tail H-term; constant in P for k = 0, which is the BU error floor."""
    K, gB, gF = params.K, params.gamma_B, params.gamma_F
    free = K - k
    c = grid.c[None, None, :]
    wc = (grid.w_B * grid.c)[None, None, :]
    total = 0.0
    for m in range(free + 1):
        cp, A = _composition_terms(grid, free - m)
        cq, B = _composition_terms(grid, m)
        lam = A[:, None, None] * gF + B[None, :, None] / gB + c
        terms = cp[:, None, None] * cq[None, :, None] * wc / lam
        total += comb(free, m) * (-1) ** m * float(terms.sum())
    return (-0.5) ** free * (grid.S_F * gF / params.P_B) ** k * total


def high_snr_bu(params: ScenarioParams, grid: QuadratureGrid) -> float:
    _require_multi_user(params, "high_snr_bu")
    K = params.K
    eta = _eta(K)
    value = sum(eta[k] * ibar_1(params, grid, k) for k in range(K + 1)) + ibar_3(params, grid)
    a1, a2 = _alpha_tilde(params)
    if a2 is not None:
        value += sum(eta[k] * ibar_2(params, grid, k) for k in range(K + 1))
        value += _leading_bu(params, grid) * (1.0 - grid.S_B * a2 / params.P_B)
    else:
        value += sum(eta[k] * hbar_2(params, grid, k) for k in range(K + 1))
    return clamp_probability(value, "high_snr_bu")


def high_snr_bu_pc(params: ScenarioParams, grid: QuadratureGrid) -> float:
    _require_multi_user(params, "high_snr_bu_pc")
    K = params.K
    eta = _eta(K)
    a1, _ = _alpha_tilde(params)
    value = sum(eta[k] * ibar_1(params, grid, k) for k in range(K + 1)) + ibar_3(params, grid)
    value += _leading_bu(params, grid) * (1.0 - grid.S_B * a1 / params.P_B)
    return clamp_probability(value, "high_snr_bu_pc")


# CS forms: the GF side collapses to 1/2 sum Psi mu^K, the GB side to S_B or sum Phi/(D_0+D_1).

def _leading_cs(params: ScenarioParams, grid: QuadratureGrid) -> float:
    return float(np.sum(grid.w_B)) * grid.gf_moment(params.K) * (params.gamma_F / params.P_B) ** params.K


def _cs_scale(params: ScenarioParams, grid: QuadratureGrid) -> float:
    return grid.S_B * grid.gf_moment(params.K) / params.P_B ** (params.K + 1)


def cs_floor(params: ScenarioParams, grid: QuadratureGrid) -> float:
    """Sum over (l, k, n) of 1/2 Psi C(K,k) (-1)^k w_B c (1/Theta_1 - 1/Theta_2) at infinite SNR."""
    K, gB, gF = params.K, params.gamma_B, params.gamma_F
    k = np.arange(K + 1, dtype=float)[None, :, None]
    mu = grid.mu[:, None, None]
    c = grid.c[None, None, :]
    signed = np.array([comb(K, j) * (-1) ** j for j in range(K + 1)], dtype=float)[None, :, None]
    coef = 0.5 * grid.psi[:, None, None] * signed * (grid.w_B * grid.c)[None, None, :]
    return float(np.sum(coef * (1.0 / (k * mu * gF + c) - 1.0 / (k * mu / gB + c))))


def high_snr_cs(params: ScenarioParams, grid: QuadratureGrid) -> float:
    K, gB, gF = params.K, params.gamma_B, params.gamma_F
    a1, a2 = _alpha_tilde(params)
    scale = _cs_scale(params, grid)
    if a2 is not None:
        value = scale * gF ** K * sum(comb(K, k) * a2 ** (k + 1) / (k + 1) for k in range(K + 1))
        value += _leading_cs(params, grid)
        value += scale * sum(
            comb(K, k) * (-1) ** (K - k) * (a1 ** (k + 1) - a2 ** (k + 1)) / (gB ** k * (k + 1))
            for k in range(K + 1)
        )
    else:
        value = cs_floor(params, grid)
        value += scale * sum(
            comb(K, k) * (-1) ** (K - k) * (gB * (1.0 + gF) ** (k + 1) - gB) / (k + 1)
            for k in range(K + 1)
        )
        value += scale * gF ** K * sum(comb(K, k) * gB ** (k + 1) / (k + 1) for k in range(K + 1))
        value += _leading_cs(params, grid)
    return clamp_probability(value, "high_snr_cs")


def high_snr_cs_pc(params: ScenarioParams, grid: QuadratureGrid) -> float:
    K, gB, gF = params.K, params.gamma_B, params.gamma_F
    value = _cs_scale(params, grid) * gF ** K * sum(
        comb(K, k) * (gB + gB * gF) ** (k + 1) / (k + 1) for k in range(K + 1)
    )
    value += _leading_cs(params, grid)
    return clamp_probability(value, "high_snr_cs_pc")


# ───────────────────────────────────────────────────────────
# Leading terms
# ───────────────────────────────────────────────────────────

def dominant_bu(params: ScenarioParams, grid: QuadratureGrid) -> float:
    _require_multi_user(params, "dominant_bu")
    if params.regime().sub_unity:
        return clamp_probability(_leading_bu(params, grid), "dominant_bu")
    return clamp_probability(hbar_2(params, grid, 0), "dominant_bu")


def dominant_bu_pc(params: ScenarioParams, grid: QuadratureGrid) -> float:
    _require_multi_user(params, "dominant_bu_pc")
    return clamp_probability(_leading_bu(params, grid), "dominant_bu_pc")


def dominant_cs(params: ScenarioParams, grid: QuadratureGrid) -> float:
    if params.regime().sub_unity:
        return clamp_probability(_leading_cs(params, grid), "dominant_cs")
    return clamp_probability(cs_floor(params, grid), "dominant_cs")


def dominant_cs_pc(params: ScenarioParams, grid: QuadratureGrid) -> float:
    return clamp_probability(_leading_cs(params, grid), "dominant_cs_pc")


_HIGH_SNR: Dict[SchemeId, Callable[[ScenarioParams, QuadratureGrid], float]] = {
    SchemeId.BU: high_snr_bu,
    SchemeId.BU_PC: high_snr_bu_pc,
    SchemeId.CS: high_snr_cs,
    SchemeId.CS_PC: high_snr_cs_pc,
}

_DOMINANT: Dict[SchemeId, Callable[[ScenarioParams, QuadratureGrid], float]] = {
    SchemeId.BU: dominant_bu,
    SchemeId.BU_PC: dominant_bu_pc,
    SchemeId.CS: dominant_cs,
    SchemeId.CS_PC: dominant_cs_pc,
}


def high_snr(scheme: SchemeId, params: ScenarioParams, grid: QuadratureGrid) -> float:
    return _HIGH_SNR[SchemeId(scheme)](params, grid)


def dominant_term(scheme: SchemeId, params: ScenarioParams, grid: QuadratureGrid) -> float:
    return _DOMINANT[SchemeId(scheme)](params, grid)
