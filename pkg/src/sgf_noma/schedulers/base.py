# src/sgf_noma/schedulers/base.py
from __future__ import annotations
from typing import Optional, Tuple

import numpy as np

from ..decoding import decoding_threshold, gb_rate_oma, hsic_rates, pc_transmission
from ..schema import ChannelBatch, OutcomeBatch, PowerRule, ScenarioParams, SchedulingOutcome


def candidate_rates(params: ScenarioParams, batch: ChannelBatch,
                    power_rule: PowerRule) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Every user's (tx_power, rx, rate, first_stage) under HSIC, plus tau0 per trial."""
    tau0 = decoding_threshold(params, batch.g2)
    tau0 = np.asarray(tau0, dtype=float)
    tau_k = tau0[:, None]
    g_k = batch.g2[:, None]
    if power_rule is PowerRule.PC:
        power, rx = pc_transmission(params, batch.h2, np.broadcast_to(g_k, batch.h2.shape),
                                    np.broadcast_to(tau_k, batch.h2.shape))
    else:
        power = np.full(batch.h2.shape, params.P_F)
        rx = params.P_F * batch.h2
    rate, first = hsic_rates(params, rx, g_k, tau_k)
    return power, rx, rate, first, tau0


class Scheduler:
    """
    Base for the admission rules. Subclasses pick one user per trial with `select`;
    rates and SIC stage then follow from hybrid SIC with the configured power rule.
    """
    name = "base"

    def __init__(self, params: ScenarioParams, power_rule: PowerRule = PowerRule.FIXED):
        self.params = params
        self.power_rule = power_rule

    def select(self, batch: ChannelBatch, rate: np.ndarray,
               selection: Optional[np.ndarray]) -> np.ndarray:
        raise NotImplementedError

    def run(self, batch: ChannelBatch, selection: Optional[np.ndarray] = None) -> OutcomeBatch:
        power, _rx, rate, first, tau0 = candidate_rates(self.params, batch, self.power_rule)
        idx = self.select(batch, rate, selection)
        rows = np.arange(batch.size)
        return OutcomeBatch(
            admitted=idx,
            tx_power=power[rows, idx],
            first_stage=first[rows, idx],
            gf_rate=rate[rows, idx],
            gb_rate=gb_rate_oma(self.params, batch.g2),
            tau0=tau0,
        )


def outage_indicator(outcome: SchedulingOutcome, params: ScenarioParams) -> int:
    """1 iff the admitted GF user misses its target rate (strict)."""
    return int(outcome.gf_rate < params.R_F)


def outage_mask(outcomes: OutcomeBatch, params: ScenarioParams) -> np.ndarray:
    return outcomes.gf_rate < params.R_F


def gb_outage_mask(outcomes: OutcomeBatch, params: ScenarioParams) -> np.ndarray:
    return outcomes.gb_rate < params.R_B
