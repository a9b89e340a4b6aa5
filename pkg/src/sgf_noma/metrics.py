from __future__ import annotations
from typing import Iterable, List, Mapping, Tuple, Union
import math

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field
from scipy.stats import norm

from .schema import MetricEstimate

Z95 = float(norm.ppf(0.975))


class RunningStats(BaseModel):
    """Count / sum / sum of squares; merges are commutative so chunk order does not matter."""
    model_config = ConfigDict(frozen=True)

    n: int = 0
    total: float = 0.0
    total_sq: float = 0.0

    @classmethod
    def of(cls, values: np.ndarray) -> "RunningStats":
        values = np.asarray(values, dtype=float)
        return cls(n=int(values.size), total=float(values.sum()), total_sq=float(np.square(values).sum()))

    def merge(self, other: "RunningStats") -> "RunningStats":
        return RunningStats(n=self.n + other.n, total=self.total + other.total,
                            total_sq=self.total_sq + other.total_sq)

    @property
    def mean(self) -> float:
        return self.total / self.n if self.n else 0.0

    @property
    def variance(self) -> float:
        if self.n < 2:
            return 0.0
        return max(self.total_sq - self.n * self.mean ** 2, 0.0) / (self.n - 1)


class SchemeTally(BaseModel):
    """Per-scheme aggregates over a set of trials."""
    model_config = ConfigDict(frozen=True)

    trials: int = 0
    outage: int = 0
    gb_outage: int = 0
    admission: List[int] = Field(default_factory=list)
    rate: RunningStats = Field(default_factory=RunningStats)

    def merge(self, other: "SchemeTally") -> "SchemeTally":
        admission = (np.asarray(self.admission or [0] * len(other.admission), dtype=np.int64)
                     + np.asarray(other.admission or [0] * len(self.admission), dtype=np.int64))
        return SchemeTally(
            trials=self.trials + other.trials,
            outage=self.outage + other.outage,
            gb_outage=self.gb_outage + other.gb_outage,
            admission=admission.tolist(),
            rate=self.rate.merge(other.rate),
        )


# ───────────────────────────────────────────────────────────
# Estimates
# ───────────────────────────────────────────────────────────

def wilson_interval(successes: int, n: int, z: float = Z95) -> Tuple[float, float]:
    if n <= 0:
        raise ValueError("Wilson interval needs n >= 1")
    p = successes / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (p + z2 / (2 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z2 / (4 * n * n)) / denom
    return max(center - half, 0.0), min(center + half, 1.0)


def proportion_estimate(successes: int, n: int) -> MetricEstimate:
    p = successes / n
    low, high = wilson_interval(successes, n)
    return MetricEstimate(
        point=p,
        std_error=math.sqrt(p * (1.0 - p) / n),
        ci95_low=min(low, p),
        ci95_high=max(high, p),
        trials=n,
    )


def mean_estimate(stats: RunningStats) -> MetricEstimate:
    """Normal-approximation interval for a mean."""
    if stats.n <= 0:
        raise ValueError("mean estimate needs at least one trial")
    se = math.sqrt(stats.variance / stats.n)
    return MetricEstimate(
        point=stats.mean,
        std_error=se,
        ci95_low=stats.mean - Z95 * se,
        ci95_high=stats.mean + Z95 * se,
        trials=stats.n,
    )


def tally_estimates(tally: SchemeTally, metrics: Iterable[str]) -> dict:
    """metric -> MetricEstimate (admission -> one estimate per user)."""
    out: dict = {}
    for metric in metrics:
        if metric == "outage":
            out[metric] = proportion_estimate(tally.outage, tally.trials)
        elif metric == "gb_outage":
            out[metric] = proportion_estimate(tally.gb_outage, tally.trials)
        elif metric == "admission":
            out[metric] = [proportion_estimate(int(c), tally.trials) for c in tally.admission]
        elif metric == "ergodic_rate":
            out[metric] = mean_estimate(tally.rate)
    return out


# ───────────────────────────────────────────────────────────
# Diversity slope
# ───────────────────────────────────────────────────────────

def empirical_diversity_slope(table: Union[pd.DataFrame, Mapping[float, float]], top_points: int = 3) -> float:
    """
    Negated least-squares slope of log10(outage) against SNR_dB / 10 over the highest
    `top_points` SNR values with non-zero outage. `table` is a frame with snr_db and
    value columns, or a {snr_db: outage} mapping.
    """
    if isinstance(table, pd.DataFrame):
        frame = table[["snr_db", "value"]].astype(float)
    else:
        frame = pd.DataFrame({"snr_db": list(table.keys()), "value": list(table.values())}, dtype=float)

    usable = frame[frame["value"] > 0].sort_values("snr_db").tail(top_points)
    if len(usable) < 2:
        raise ValueError(
            f"diversity slope needs at least 2 points with outage > 0, got {len(usable)}"
        )
    slope, _ = np.polyfit(usable["snr_db"].to_numpy() / 10.0, np.log10(usable["value"].to_numpy()), 1)
    return float(-slope)
