from __future__ import annotations
from typing import Tuple, Union

import numpy as np

from .schema import FsicOrder, ScenarioParams, SicStage
from .utils import log2_1p

ArrayLike = Union[float, np.ndarray]


def decoding_threshold(params: ScenarioParams, g2: ArrayLike) -> ArrayLike:
    """tau0 = max(0, P_B g2 / gamma_B - 1): largest GF interference the GB signal tolerates when decoded first."""
    tau0 = np.maximum(0.0, params.P_B * np.asarray(g2, dtype=float) / params.gamma_B - 1.0)
    return float(tau0) if np.ndim(tau0) == 0 else tau0


def hsic_rates(params: ScenarioParams, rx: np.ndarray, g2: np.ndarray,
               tau0: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Rates for received GF powers `rx` = P |h|^2 under hybrid SIC.
    First stage iff rx > tau0 (a tie goes to the second stage). Returns (rate, first_stage).
    """
    rx = np.asarray(rx, dtype=float)
    first = rx > tau0
    interference = params.P_B * np.asarray(g2, dtype=float) + 1.0
    rate = np.where(first, log2_1p(rx / interference), log2_1p(rx))
    return rate, first


def achievable_rate_hsic(params: ScenarioParams, h2_k: float, tx_power: float,
                         g2: float, tau0: float) -> Tuple[float, SicStage]:
    rate, first = hsic_rates(params, np.asarray(tx_power * h2_k), np.asarray(g2), np.asarray(tau0))
    return float(rate), (SicStage.FIRST if bool(first) else SicStage.SECOND)


def pc_transmission(params: ScenarioParams, h2: np.ndarray, g2: np.ndarray,
                    tau0: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Power-control rule as (tx_power, received power). Inside the window
    tau0/P_m < h2 < tau0 (1 + P_B g2) / P_m the user backs off to tau0/h2 and its
    received power is exactly tau0; elsewhere it sends P_m.
    """
    h2 = np.asarray(h2, dtype=float)
    tau0 = np.asarray(tau0, dtype=float)
    upper = tau0 * (1.0 + params.P_B * np.asarray(g2, dtype=float)) / params.P_m
    window = (h2 > tau0 / params.P_m) & (h2 < upper)
    safe_h2 = np.where(window, h2, 1.0)
    power = np.where(window, tau0 / safe_h2, params.P_m)
    rx = np.where(window, tau0, params.P_m * h2)
    return power, rx


def power_control(params: ScenarioParams, h2_k: ArrayLike, g2: ArrayLike, tau0: ArrayLike) -> ArrayLike:
    h2_b, g2_b, tau_b = np.broadcast_arrays(
        np.asarray(h2_k, dtype=float), np.asarray(g2, dtype=float), np.asarray(tau0, dtype=float)
    )
    power, _ = pc_transmission(params, h2_b, g2_b, tau_b)
    return float(power) if np.ndim(power) == 0 else power


def gb_rate_oma(params: ScenarioParams, g2: ArrayLike) -> ArrayLike:
    return log2_1p(params.P_B * np.asarray(g2, dtype=float))


def fsic_rates(params: ScenarioParams, rx: np.ndarray, g2: np.ndarray,
               order: FsicOrder = FsicOrder.GF_FIRST) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Fixed-order SIC. Returns (gf_rate, gb_rate, first_stage).

    gf-first: the GF signal is always decoded first against the GB interference; the
    GB signal is interference-free only when the GF decode met R_F.
    gb-first: the GB signal is decoded first against the GF interference; the GF
    signal is recovered (interference-free) only when that succeeded, otherwise its rate is 0.
    """
    rx = np.asarray(rx, dtype=float)
    p_b_g = params.P_B * np.asarray(g2, dtype=float)
    if order is FsicOrder.GF_FIRST:
        gf = log2_1p(rx / (p_b_g + 1.0))
        gb = np.where(gf >= params.R_F, log2_1p(p_b_g), log2_1p(p_b_g / (rx + 1.0)))
        return gf, gb, np.ones_like(rx, dtype=bool)
    gb = log2_1p(p_b_g / (rx + 1.0))
    gf = np.where(gb >= params.R_B, log2_1p(rx), 0.0)
    return gf, gb, np.zeros_like(rx, dtype=bool)
