# src/sgf_noma/schedulers/cdf_based.py
from __future__ import annotations
from typing import Optional

import numpy as np

from ..schema import ChannelBatch
from .base import Scheduler


def cdf_scores(batch: ChannelBatch, alpha: float) -> np.ndarray:
    """
    (1 + r^alpha) |h|^2 per user. F_k(|h_k|^2 | r_k) is increasing in this score, so
    ranking by it equals ranking by the CDF value and does not saturate at 1.
    """
    return (1.0 + batch.r ** alpha) * batch.h2


class CdfScheduler(Scheduler):
    """Admits the user whose gain has the largest CDF value under its own distance; lowest index on ties."""
    name = "CS"

    def select(self, batch: ChannelBatch, rate: np.ndarray,
               selection: Optional[np.ndarray]) -> np.ndarray:
        return np.argmax(cdf_scores(batch, self.params.alpha), axis=1)
