from __future__ import annotations
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


# ───────────────────────────────────────────────────────────
# Enumerations
# ───────────────────────────────────────────────────────────

class SchemeId(str, Enum):
    BU = "BU"
    BU_PC = "BU-PC"
    CS = "CS"
    CS_PC = "CS-PC"
    RS = "RS"
    RS_PC = "RS-PC"
    RS_FSIC = "RS-FSIC"

    @property
    def rule(self) -> str:
        """Selection rule: BU, CS or RS."""
        return self.value.split("-")[0]

    @property
    def power_control(self) -> bool:
        return self.value.endswith("-PC")

    @property
    def fsic(self) -> bool:
        return self is SchemeId.RS_FSIC


class PowerRule(str, Enum):
    FIXED = "fixed"
    PC = "pc"


class SicStage(str, Enum):
    FIRST = "first"
    SECOND = "second"


class Decoding(str, Enum):
    HSIC = "hsic"
    FSIC = "fsic"


class FsicOrder(str, Enum):
    GF_FIRST = "gf-first"
    GB_FIRST = "gb-first"


class AnalyticMode(str, Enum):
    EXACT = "exact-quadrature"
    HIGH_SNR = "high-snr"
    DOMINANT = "dominant-term"
    ORACLE = "numeric-oracle"


class Regime(str, Enum):
    SUB_UNITY = "sub-unity"
    SUPER_UNITY = "super-unity"


METRICS = ("outage", "admission", "ergodic_rate", "gb_outage")


# ───────────────────────────────────────────────────────────
# Scenario
# ───────────────────────────────────────────────────────────

class DerivedThresholds(BaseModel):
    """Target channel gains. alpha_2 is None when gamma_B * gamma_F >= 1 (conceptually +inf)."""
    model_config = ConfigDict(frozen=True)

    alpha_B: float
    alpha_F: float
    alpha_1: float
    alpha_2: Optional[float] = None


class RegimeFlag(BaseModel):
    model_config = ConfigDict(frozen=True)

    product: float
    branch: Regime

    @classmethod
    def of(cls, gamma_B: float, gamma_F: float) -> "RegimeFlag":
        product = gamma_B * gamma_F
        branch = Regime.SUB_UNITY if product < 1.0 else Regime.SUPER_UNITY
        return cls(product=product, branch=branch)

    @property
    def sub_unity(self) -> bool:
        return self.branch is Regime.SUB_UNITY


class ScenarioParams(BaseModel):
    """Static system configuration. Powers are linear with unit noise power, so they read as SNRs."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    alpha: float = Field(3.0, gt=0)
    K: int = Field(4, ge=1)
    D_F: float = Field(3.0, gt=0)
    D_F_inner: float = Field(0.0, ge=0)
    D_0: float = Field(1.0, gt=0)
    D_1: float = Field(3.0, gt=0)
    R_B: float = Field(1.0, gt=0)
    R_F: float = Field(0.9, gt=0)
    P_B: float = Field(100.0, gt=0)
    P_F: float = Field(100.0, gt=0)
    P_m: float = Field(100.0, gt=0)

    @model_validator(mode="after")
    def _check_ranges(self) -> "ScenarioParams":
        if not self.D_0 < self.D_1:
            raise ValueError(f"GB ring needs D_0 < D_1, got D_0={self.D_0}, D_1={self.D_1}")
        if self.D_F_inner > self.D_F:
            raise ValueError(f"GF region needs D_F_inner <= D_F, got {self.D_F_inner} > {self.D_F}")
        if self.P_F > self.P_m or self.P_B > self.P_m:
            raise ValueError(
                f"powers must not exceed P_m={self.P_m}: P_B={self.P_B}, P_F={self.P_F}"
            )
        return self

    @property
    def gamma_B(self) -> float:
        return 2.0 ** self.R_B - 1.0

    @property
    def gamma_F(self) -> float:
        return 2.0 ** self.R_F - 1.0

    @property
    def fixed_distance_gf(self) -> bool:
        return self.D_F_inner == self.D_F

    def regime(self) -> RegimeFlag:
        return RegimeFlag.of(self.gamma_B, self.gamma_F)

    def gf_power(self, power_control: bool = False) -> float:
        return self.P_m if power_control else self.P_F

    def thresholds(self, power_control: bool = False) -> DerivedThresholds:
        gB, gF = self.gamma_B, self.gamma_F
        alpha_B = gB / self.P_B
        alpha_1 = alpha_B * (1.0 + gF)
        alpha_2 = alpha_1 / (1.0 - gB * gF) if gB * gF < 1.0 else None
        return DerivedThresholds(
            alpha_B=alpha_B,
            alpha_F=gF / self.gf_power(power_control),
            alpha_1=alpha_1,
            alpha_2=alpha_2,
        )

    def with_snr_db(self, snr_db: float, pin_P_B_db: Optional[float] = None) -> "ScenarioParams":
        """Sweep convention: P_F = P_m = SNR, and P_B follows unless pinned."""
        p = 10.0 ** (snr_db / 10.0)
        p_b = p if pin_P_B_db is None else 10.0 ** (pin_P_B_db / 10.0)
        return ScenarioParams(**{**self.model_dump(), "P_B": p_b, "P_F": p, "P_m": p})


# ───────────────────────────────────────────────────────────
# Per-trial records
# ───────────────────────────────────────────────────────────

class ChannelRealization(BaseModel):
    model_config = ConfigDict(frozen=True)

    r_B: float
    r: List[float]
    g2: float
    h2: List[float]

    @field_validator("h2")
    @classmethod
    def _positive_gains(cls, v: List[float]) -> List[float]:
        if any(x < 0 for x in v):
            raise ValueError("channel gains must be non-negative")
        return v


class SchedulingOutcome(BaseModel):
    model_config = ConfigDict(frozen=True)

    admitted_index: int
    tx_power: float
    sic_stage: SicStage
    gf_rate: float
    gb_rate: float
    tau0: float


class ChannelBatch(BaseModel):
    """A block of trials: r_B, g2 have shape (n,), r, h2 have shape (n, K)."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    r_B: np.ndarray
    r: np.ndarray
    g2: np.ndarray
    h2: np.ndarray

    @property
    def size(self) -> int:
        return int(self.g2.shape[0])

    @property
    def K(self) -> int:
        return int(self.h2.shape[1])

    @classmethod
    def from_realization(cls, rz: ChannelRealization) -> "ChannelBatch":
        return cls(
            r_B=np.array([rz.r_B], dtype=float),
            r=np.array([rz.r], dtype=float),
            g2=np.array([rz.g2], dtype=float),
            h2=np.array([rz.h2], dtype=float),
        )

    def realization(self, i: int) -> ChannelRealization:
        return ChannelRealization(
            r_B=float(self.r_B[i]), r=self.r[i].tolist(),
            g2=float(self.g2[i]), h2=self.h2[i].tolist(),
        )


class OutcomeBatch(BaseModel):
    """Vectorized SchedulingOutcome records, one entry per trial."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    admitted: np.ndarray
    tx_power: np.ndarray
    first_stage: np.ndarray
    gf_rate: np.ndarray
    gb_rate: np.ndarray
    tau0: np.ndarray

    def outcome(self, i: int) -> SchedulingOutcome:
        return SchedulingOutcome(
            admitted_index=int(self.admitted[i]),
            tx_power=float(self.tx_power[i]),
            sic_stage=SicStage.FIRST if bool(self.first_stage[i]) else SicStage.SECOND,
            gf_rate=float(self.gf_rate[i]),
            gb_rate=float(self.gb_rate[i]),
            tau0=float(self.tau0[i]),
        )


# ───────────────────────────────────────────────────────────
# Experiments
# ───────────────────────────────────────────────────────────

class MetricEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    point: float
    std_error: float
    ci95_low: float
    ci95_high: float
    trials: int

    @model_validator(mode="after")
    def _brackets(self) -> "MetricEstimate":
        if not (self.ci95_low <= self.point + 1e-12 and self.point <= self.ci95_high + 1e-12):
            raise ValueError(
                f"interval [{self.ci95_low}, {self.ci95_high}] does not bracket {self.point}"
            )
        return self


class FixedGeometryOverride(BaseModel):
    """Distances held constant across trials; `manual` allows them outside the configured regions."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    gf_distances: Optional[List[float]] = None
    gb_distance: Optional[float] = None
    manual: bool = False

    @field_validator("gf_distances", mode="before")
    @classmethod
    def _coerce_list(cls, v: Any) -> Optional[List[float]]:
        if v is None or isinstance(v, list):
            return v
        if isinstance(v, str):
            return [float(x) for x in v.split(",") if x.strip()]
        return list(v)

    def check(self, params: ScenarioParams) -> None:
        if self.gf_distances is not None and len(self.gf_distances) != params.K:
            raise ValueError(
                f"geometry lists {len(self.gf_distances)} GF distances for K={params.K}"
            )
        if self.manual:
            return
        for d in self.gf_distances or []:
            if not params.D_F_inner <= d <= params.D_F:
                raise ValueError(f"GF distance {d} outside [{params.D_F_inner}, {params.D_F}]; set manual")
        if self.gb_distance is not None and not params.D_0 <= self.gb_distance <= params.D_1:
            raise ValueError(f"GB distance {self.gb_distance} outside [{params.D_0}, {params.D_1}]; set manual")


class SweepPoint(BaseModel):
    """Overrides applied to the base scenario at one sweep position."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    snr_db: Optional[float] = None
    K: Optional[int] = None
    alpha: Optional[float] = None
    R_B: Optional[float] = None
    R_F: Optional[float] = None


class ExperimentPlan(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    schemes: List[SchemeId]
    params: ScenarioParams = Field(default_factory=ScenarioParams)
    sweep: List[SweepPoint] = Field(default_factory=list)
    trials: int = Field(1_000_000, ge=1)
    master_seed: int = Field(42, ge=0)
    metrics: List[str] = Field(default_factory=lambda: ["outage"])
    geometry: Optional[FixedGeometryOverride] = None
    pin_P_B_db: Optional[float] = None
    fsic_order: FsicOrder = FsicOrder.GF_FIRST
    chunk_size: int = Field(65_536, ge=1)

    @field_validator("schemes", mode="before")
    @classmethod
    def _coerce_schemes(cls, v: Any) -> List[Any]:
        if isinstance(v, (str, SchemeId)):
            return [v]
        return list(v)

    @field_validator("metrics")
    @classmethod
    def _known_metrics(cls, v: List[str]) -> List[str]:
        unknown = [m for m in v if m not in METRICS]
        if unknown:
            raise ValueError(f"unknown metrics {unknown}; expected a subset of {list(METRICS)}")
        return v

    @model_validator(mode="after")
    def _points_valid(self) -> "ExperimentPlan":
        for point in self.sweep:
            params = self.point_params(point)
            if self.geometry is not None:
                self.geometry.check(params)
        if not self.sweep and self.geometry is not None:
            self.geometry.check(self.params)
        return self

    def point_params(self, point: SweepPoint) -> ScenarioParams:
        update = {k: v for k, v in point.model_dump().items() if v is not None and k != "snr_db"}
        params = ScenarioParams(**{**self.params.model_dump(), **update})
        if point.snr_db is not None:
            params = params.with_snr_db(point.snr_db, self.pin_P_B_db)
        return params

    def points(self) -> List[SweepPoint]:
        return list(self.sweep) if self.sweep else [SweepPoint()]


class AnalyticRequest(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    scheme: SchemeId
    params: ScenarioParams
    grid: Any = None
    mode: AnalyticMode = AnalyticMode.EXACT

    @model_validator(mode="after")
    def _fsic_only_oracle(self) -> "AnalyticRequest":
        if self.scheme.fsic and self.mode is not AnalyticMode.ORACLE:
            raise ValueError("RS-FSIC has no closed form; use the numeric-oracle mode")
        return self
