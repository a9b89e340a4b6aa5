# src/sgf_noma/schedulers/best_user.py
from __future__ import annotations
from typing import Optional

import numpy as np

from ..schema import ChannelBatch
from .base import Scheduler


class BestUserScheduler(Scheduler):
    """Admits the user with the largest achievable rate; ties go to the lowest index."""
    name = "BU"

    def select(self, batch: ChannelBatch, rate: np.ndarray,
               selection: Optional[np.ndarray]) -> np.ndarray:
        return np.argmax(rate, axis=1)
