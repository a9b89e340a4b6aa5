from __future__ import annotations
from collections import Counter
from typing import Dict, Union
import logging

import numpy as np

log = logging.getLogger("sgf")

# Process-wide tally of probabilities pulled back into [0, 1], keyed by source.
CLAMP_EVENTS: Counter = Counter()

ArrayLike = Union[float, np.ndarray]


def clamp_probability(value: ArrayLike, source: str) -> ArrayLike:
    """Clip into [0, 1]; every out-of-range entry is counted under `source`."""
    arr = np.asarray(value, dtype=float)
    bad = int(np.count_nonzero((arr < 0.0) | (arr > 1.0)))
    if bad:
        CLAMP_EVENTS[source] += bad
        log.debug(f"[sgf] clamped {bad} value(s) from {source} (min={arr.min():.3e}, max={arr.max():.3e})")
    out = np.clip(arr, 0.0, 1.0)
    if np.ndim(value) == 0:
        return float(out)
    return out


def clamp_events() -> Dict[str, int]:
    return dict(sorted(CLAMP_EVENTS.items()))


def reset_clamp_events() -> None:
    CLAMP_EVENTS.clear()


def require_nonnegative(value: ArrayLike, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if np.any(arr < 0.0) or np.any(np.isnan(arr)):
        raise ValueError(f"{name} must be >= 0, got {value!r}")
    return arr
