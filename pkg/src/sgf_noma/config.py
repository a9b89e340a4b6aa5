"""
Run configuration: flat `key = value` settings with dotted keys.

Sources, lowest precedence first: figure preset, config file, SGF_* environment
variables, explicit flags / --set. The merged settings dict is kept on RunConfig so a
manifest can replay it exactly.
"""
from __future__ import annotations
from enum import Enum
from itertools import product
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .presets import preset_settings
from .quadrature import QuadratureOrders
from .schema import AnalyticMode, ExperimentPlan, FixedGeometryOverride, ScenarioParams, SchemeId, SweepPoint
from .utils import config_hash, parse_float_list, parse_int_list, parse_range, parse_rate_pairs


class RunMode(str, Enum):
    MC = "mc"
    ANALYTIC = "analytic"
    BOTH = "both"
    HIGH_SNR = "high-snr"
    ORACLE = "oracle"

    @property
    def simulate(self) -> bool:
        return self in (RunMode.MC, RunMode.BOTH)

    @property
    def analytic_modes(self) -> List[AnalyticMode]:
        if self is RunMode.MC:
            return []
        if self is RunMode.HIGH_SNR:
            return [AnalyticMode.EXACT, AnalyticMode.HIGH_SNR, AnalyticMode.DOMINANT]
        if self is RunMode.ORACLE:
            return [AnalyticMode.EXACT, AnalyticMode.ORACLE]
        return [AnalyticMode.EXACT]


SCENARIO_KEYS = ("alpha", "K", "D_F", "D_F_inner", "D_0", "D_1", "R_B", "R_F")

KNOWN_KEYS = frozenset(
    [f"scenario.{k}" for k in SCENARIO_KEYS]
    + ["power.pin_P_B_db"]
    + [f"sweep.{k}" for k in ("snr_db", "K", "alpha", "rate_pairs")]
    + [f"geometry.{k}" for k in ("gf_distances", "gb_distance", "manual")]
    + [f"quadrature.{k}" for k in ("L", "N", "I", "J", "M")]
    + [f"run.{k}" for k in ("schemes", "metrics", "mode", "trials", "seed", "workers", "out", "chunk_size", "preset")]
    + ["scheme.fsic_order"]
)

REQUIRED_CUSTOM = ("run.schemes", "sweep.snr_db")

ENV_KEYS = {
    "SGF_WORKERS": "run.workers",
    "SGF_SEED": "run.seed",
    "SGF_TRIALS": "run.trials",
    "SGF_OUT": "run.out",
}


class RunConfig(BaseModel):
    """A validated run: the experiment plan plus how to execute and where to write."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    plan: ExperimentPlan
    mode: RunMode = RunMode.MC
    out: str = "results"
    preset: str = "custom"
    workers: int = Field(1, ge=1)
    orders: QuadratureOrders = Field(default_factory=QuadratureOrders)
    settings: Dict[str, str] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _bu_needs_users(self) -> "RunConfig":
        closed_form = set(self.mode.analytic_modes) - {AnalyticMode.ORACLE}
        bu = [s for s in self.plan.schemes if s.rule == "BU"]
        if not (closed_form and bu):
            return self
        for point in self.plan.points():
            K = self.plan.point_params(point).K
            if K < 2:
                raise ValueError(
                    f"{', '.join(s.value for s in bu)} in {self.mode.value} mode needs K >= 2 (sweep has K={K})"
                )
        return self

    @property
    def hash(self) -> str:
        return config_hash(self.settings)


# ───────────────────────────────────────────────────────────
# Reading settings
# ───────────────────────────────────────────────────────────

def _split_line(line: str, where: str) -> Optional[Tuple[str, str]]:
    line = line.split("#", 1)[0].strip()
    if not line:
        return None
    key, sep, value = line.partition("=")
    if not sep or not key.strip():
        raise ValueError(f"{where}: expected 'key = value', got {line!r}")
    return key.strip(), value.strip()


def read_config_file(path: str | Path) -> Dict[str, str]:
    out: Dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for n, line in enumerate(text.splitlines(), 1):
        kv = _split_line(line, f"{path}:{n}")
        if kv:
            out[kv[0]] = kv[1]
    return out


def parse_overrides(items: Iterable[str]) -> Dict[str, str]:
    """['run.trials=1000', ...] -> {'run.trials': '1000', ...}"""
    out: Dict[str, str] = {}
    for item in items or []:
        kv = _split_line(item, "--set")
        if kv:
            out[kv[0]] = kv[1]
    return out


def env_settings(environ: Mapping[str, str]) -> Dict[str, str]:
    return {key: environ[name] for name, key in ENV_KEYS.items() if environ.get(name)}


def _check_keys(settings: Mapping[str, str]) -> None:
    unknown = sorted(set(settings) - KNOWN_KEYS)
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")


# ───────────────────────────────────────────────────────────
# Building the run
# ───────────────────────────────────────────────────────────

def _as_bool(text: str) -> bool:
    v = text.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _as_int(text: str) -> int:
    v = float(text)
    if v != int(v):
        raise ValueError(f"expected an integer, got {text!r}")
    return int(v)


def _sweep_points(s: Mapping[str, str]) -> List[SweepPoint]:
    """Rate pairs outermost, then alpha, then K, with SNR varying fastest."""
    rates: List[Any] = parse_rate_pairs(s["sweep.rate_pairs"]) if "sweep.rate_pairs" in s else [None]
    alphas: List[Any] = parse_float_list(s["sweep.alpha"]) if "sweep.alpha" in s else [None]
    ks: List[Any] = parse_int_list(s["sweep.K"]) if "sweep.K" in s else [None]
    snrs: List[Any] = parse_range(s["sweep.snr_db"]) if "sweep.snr_db" in s else [None]
    points = []
    for rate, alpha, K, snr in product(rates, alphas, ks, snrs):
        points.append(SweepPoint(
            snr_db=snr, K=K, alpha=alpha,
            R_B=rate[0] if rate else None, R_F=rate[1] if rate else None,
        ))
    if points == [SweepPoint()]:
        return []
    return points


def parse_settings(settings: Mapping[str, str]) -> RunConfig:
    """Validate fully merged settings (no preset expansion) into a RunConfig."""
    s = dict(settings)
    _check_keys(s)

    scenario: Dict[str, Any] = {}
    for key in SCENARIO_KEYS:
        if f"scenario.{key}" in s:
            raw = s[f"scenario.{key}"]
            scenario[key] = _as_int(raw) if key == "K" else float(raw)

    geometry = None
    if any(k.startswith("geometry.") for k in s):
        geometry = FixedGeometryOverride(
            gf_distances=s.get("geometry.gf_distances"),
            gb_distance=float(s["geometry.gb_distance"]) if "geometry.gb_distance" in s else None,
            manual=_as_bool(s.get("geometry.manual", "false")),
        )

    plan_kwargs: Dict[str, Any] = {
        "schemes": [SchemeId(x.strip()) for x in s.get("run.schemes", "").split(",") if x.strip()],
        "params": ScenarioParams(**scenario),
        "sweep": _sweep_points(s),
        "geometry": geometry,
    }
    if "run.metrics" in s:
        plan_kwargs["metrics"] = [m.strip() for m in s["run.metrics"].split(",") if m.strip()]
    if "run.trials" in s:
        plan_kwargs["trials"] = _as_int(s["run.trials"])
    if "run.seed" in s:
        plan_kwargs["master_seed"] = _as_int(s["run.seed"])
    if "run.chunk_size" in s:
        plan_kwargs["chunk_size"] = _as_int(s["run.chunk_size"])
    if "power.pin_P_B_db" in s:
        plan_kwargs["pin_P_B_db"] = float(s["power.pin_P_B_db"])
    if "scheme.fsic_order" in s:
        plan_kwargs["fsic_order"] = s["scheme.fsic_order"]
    if not plan_kwargs["schemes"]:
        raise ValueError("run.schemes lists no schemes")

    orders = QuadratureOrders(**{k: _as_int(s[f"quadrature.{k}"]) for k in "LNIJM" if f"quadrature.{k}" in s})

    return RunConfig(
        plan=ExperimentPlan(**plan_kwargs),
        mode=RunMode(s.get("run.mode", RunMode.MC.value)),
        out=s.get("run.out", "results"),
        preset=s.get("run.preset", "custom"),
        workers=_as_int(s.get("run.workers", "1")),
        orders=orders,
        settings=dict(sorted(s.items())),
    )


def parse_config(path: Optional[str | Path] = None, overrides: Optional[Mapping[str, str]] = None,
                 environ: Optional[Mapping[str, str]] = None) -> RunConfig:
    """
    Merge preset < file < environment < overrides and validate. The preset is named by
    run.preset in the overrides or the file; 'custom' (or none) must spell out
    run.schemes and sweep.snr_db.
    """
    from_file = read_config_file(path) if path else {}
    overrides = dict(overrides or {})
    _check_keys(from_file)
    _check_keys(overrides)

    name = overrides.get("run.preset") or from_file.get("run.preset") or "custom"
    merged: Dict[str, str] = {} if name == "custom" else preset_settings(name)
    merged.update(from_file)
    merged.update(env_settings(environ or {}))
    merged.update(overrides)
    merged["run.preset"] = name

    if name == "custom":
        missing = [k for k in REQUIRED_CUSTOM if k not in merged]
        if missing:
            raise ValueError(f"custom config is missing required keys: {', '.join(missing)}")
    return parse_settings(merged)
