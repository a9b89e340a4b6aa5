# src/sgf_noma/schedulers/__init__.py
from __future__ import annotations
from typing import Union

import numpy as np

from ..schema import (
    ChannelBatch, ChannelRealization, Decoding, FsicOrder, PowerRule, ScenarioParams,
    SchedulingOutcome, SchemeId,
)
from .base import Scheduler, candidate_rates, gb_outage_mask, outage_indicator, outage_mask
from .best_user import BestUserScheduler
from .cdf_based import CdfScheduler, cdf_scores
from .random_selection import FixedOrderScheduler, RandomScheduler, draw_selection

__all__ = [
    "Scheduler", "BestUserScheduler", "CdfScheduler", "RandomScheduler", "FixedOrderScheduler",
    "build_scheduler", "schedule_bu", "schedule_cs", "schedule_rs",
    "outage_indicator", "outage_mask", "gb_outage_mask", "candidate_rates", "cdf_scores", "draw_selection",
]


def build_scheduler(scheme: Union[SchemeId, str], params: ScenarioParams,
                    fsic_order: FsicOrder = FsicOrder.GF_FIRST) -> Scheduler:
    scheme = SchemeId(scheme)
    rule = PowerRule.PC if scheme.power_control else PowerRule.FIXED
    if scheme.fsic:
        return FixedOrderScheduler(params, fsic_order)
    if scheme.rule == "BU":
        return BestUserScheduler(params, rule)
    if scheme.rule == "CS":
        return CdfScheduler(params, rule)
    return RandomScheduler(params, rule)


def _rule(power_rule: Union[PowerRule, str]) -> PowerRule:
    return PowerRule(power_rule)


def schedule_bu(params: ScenarioParams, realization: ChannelRealization,
                power_rule: Union[PowerRule, str] = PowerRule.FIXED) -> SchedulingOutcome:
    batch = ChannelBatch.from_realization(realization)
    return BestUserScheduler(params, _rule(power_rule)).run(batch).outcome(0)


def schedule_cs(params: ScenarioParams, realization: ChannelRealization,
                power_rule: Union[PowerRule, str] = PowerRule.FIXED) -> SchedulingOutcome:
    batch = ChannelBatch.from_realization(realization)
    return CdfScheduler(params, _rule(power_rule)).run(batch).outcome(0)


def schedule_rs(params: ScenarioParams, realization: ChannelRealization, rng: np.random.Generator,
                decoding: Union[Decoding, str] = Decoding.HSIC,
                power_rule: Union[PowerRule, str] = PowerRule.FIXED,
                fsic_order: FsicOrder = FsicOrder.GF_FIRST) -> SchedulingOutcome:
    batch = ChannelBatch.from_realization(realization)
    selection = draw_selection(rng, 1, len(realization.h2))
    if Decoding(decoding) is Decoding.FSIC:
        return FixedOrderScheduler(params, fsic_order).run(batch, selection).outcome(0)
    return RandomScheduler(params, _rule(power_rule)).run(batch, selection).outcome(0)
