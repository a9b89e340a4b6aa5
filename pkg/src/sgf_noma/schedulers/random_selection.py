# src/sgf_noma/schedulers/random_selection.py
from __future__ import annotations
from typing import Optional

import numpy as np

from ..decoding import decoding_threshold, fsic_rates
from ..schema import ChannelBatch, FsicOrder, OutcomeBatch, PowerRule, ScenarioParams
from .base import Scheduler


def draw_selection(rng: np.random.Generator, size: int, K: int) -> np.ndarray:
    return rng.integers(0, K, size=size)


class RandomScheduler(Scheduler):
    """Uniform random admission with hybrid SIC. `selection` must hold the drawn user per trial."""
    name = "RS"

    def select(self, batch: ChannelBatch, rate: np.ndarray,
               selection: Optional[np.ndarray]) -> np.ndarray:
        if selection is None:
            raise ValueError("random selection needs the per-trial selection array")
        return np.asarray(selection, dtype=np.int64)


class FixedOrderScheduler(Scheduler):
    """Random admission decoded with a fixed SIC order at power P_F (the benchmark)."""
    name = "RS-FSIC"

    def __init__(self, params: ScenarioParams, order: FsicOrder = FsicOrder.GF_FIRST):
        super().__init__(params, PowerRule.FIXED)
        self.order = order

    def run(self, batch: ChannelBatch, selection: Optional[np.ndarray] = None) -> OutcomeBatch:
        if selection is None:
            raise ValueError("random selection needs the per-trial selection array")
        idx = np.asarray(selection, dtype=np.int64)
        rows = np.arange(batch.size)
        rx = self.params.P_F * batch.h2[rows, idx]
        gf, gb, first = fsic_rates(self.params, rx, batch.g2, self.order)
        return OutcomeBatch(
            admitted=idx,
            tx_power=np.full(batch.size, self.params.P_F),
            first_stage=first,
            gf_rate=gf,
            gb_rate=gb,
            tau0=np.asarray(decoding_threshold(self.params, batch.g2), dtype=float),
        )
