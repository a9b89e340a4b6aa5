from __future__ import annotations
from pathlib import Path
from typing import Any, Dict, List, Optional
import json
import platform

import numpy as np
import pandas as pd
import scipy

from .engine import PointResult
from .schema import AnalyticMode
from .utils import linear_to_db

# Stable long-format schema; user_index is empty except for admission rows
CSV_FIELDS: List[str] = [
    "preset", "scheme", "mode",
    "snr_db", "K", "R_B", "R_F", "alpha",
    "metric", "user_index",
    "value", "ci_low", "ci_high", "trials",
]

# analytic mode -> value of the CSV mode column
MODE_LABELS: Dict[AnalyticMode, str] = {
    AnalyticMode.EXACT: "analytic",
    AnalyticMode.HIGH_SNR: "high-snr",
    AnalyticMode.DOMINANT: "dominant",
    AnalyticMode.ORACLE: "oracle",
}

WIDE_KEYS = ["preset", "scheme", "snr_db", "K", "R_B", "R_F", "alpha", "metric", "user_index"]

FLOAT_FORMAT = "%.10g"


def _axis(result: PointResult) -> Dict[str, Any]:
    p = result.params
    return {
        "snr_db": round(linear_to_db(p.P_m), 10),
        "K": p.K,
        "R_B": p.R_B,
        "R_F": p.R_F,
        "alpha": p.alpha,
    }


class CSVExporter:
    def __init__(self, preset: str = "custom"):
        self.preset = preset
        self.rows: List[Dict[str, Any]] = []

    def _row(self, result: PointResult, scheme: str, mode: str, metric: str, value: float,
             user_index: Optional[int] = None, estimate=None) -> Dict[str, Any]:
        row = {"preset": self.preset, "scheme": scheme, "mode": mode, **_axis(result),
               "metric": metric, "user_index": user_index, "value": value,
               "ci_low": None, "ci_high": None, "trials": None}
        if estimate is not None:
            row.update(ci_low=estimate.ci95_low, ci_high=estimate.ci95_high, trials=estimate.trials)
        return row

    def add_point(self, result: PointResult) -> None:
        for scheme, metrics in result.estimates.items():
            for metric, est in metrics.items():
                if isinstance(est, list):
                    for i, e in enumerate(est):
                        self.rows.append(self._row(result, scheme.value, "mc", metric, e.point, i, e))
                else:
                    self.rows.append(self._row(result, scheme.value, "mc", metric, est.point, None, est))
        for mode, values in result.analytic.items():
            for scheme, value in values.items():
                self.rows.append(self._row(result, scheme.value, MODE_LABELS[mode], "outage", value))

    def export(self) -> pd.DataFrame:
        df = pd.DataFrame(self.rows, columns=CSV_FIELDS)
        df["user_index"] = df["user_index"].astype("Int64")
        df["trials"] = df["trials"].astype("Int64")
        df["K"] = df["K"].astype("Int64")
        for col in ("snr_db", "R_B", "R_F", "alpha", "value", "ci_low", "ci_high"):
            df[col] = df[col].astype(float)
        return df

    def export_wide(self) -> pd.DataFrame:
        """One row per (scheme, point, metric, user): MC estimate and CI next to every analytic value."""
        df = self.export()
        if df.empty:
            return df
        keyed = df.assign(user_index=df["user_index"].fillna(-1))
        mc = keyed[keyed["mode"] == "mc"].rename(
            columns={"value": "mc", "ci_low": "mc_ci_low", "ci_high": "mc_ci_high"}
        )[WIDE_KEYS + ["mc", "mc_ci_low", "mc_ci_high", "trials"]]
        other = keyed[keyed["mode"] != "mc"]
        if other.empty:
            wide = mc
        else:
            pivot = other.pivot_table(index=WIDE_KEYS, columns="mode", values="value", aggfunc="first").reset_index()
            pivot.columns.name = None
            wide = pivot if mc.empty else mc.merge(pivot, on=WIDE_KEYS, how="outer", sort=False)
        wide = wide.sort_values(["scheme", "alpha", "R_B", "R_F", "K", "snr_db", "metric", "user_index"],
                                kind="stable").reset_index(drop=True)
        wide["user_index"] = wide["user_index"].astype("Int64").mask(wide["user_index"] == -1)
        return wide

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.export().to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return path

    def write_wide(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.export_wide().to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return path


# ───────────────────────────────────────────────────────────
# Run manifest
# ───────────────────────────────────────────────────────────

def library_versions() -> Dict[str, str]:
    from . import __version__
    return {
        "sgf_noma": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
    }


def write_manifest(path: str | Path, *, settings: Dict[str, str], config_hash: str, seed: int,
                   wall_time_s: float, outputs: List[str], failures: List[Dict[str, Any]],
                   clamp_events: Dict[str, int], points: int) -> Path:
    """manifest.json: everything needed to replay the run, plus what happened during it."""
    path = Path(path)
    record = {
        "config_hash": config_hash,
        "seed": seed,
        "settings": settings,
        "versions": library_versions(),
        "wall_time_s": round(wall_time_s, 3),
        "points": points,
        "outputs": outputs,
        "failures": failures,
        "clamp_events": clamp_events,
        "status": "failed" if failures else "ok",
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(record, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_manifest(path: str | Path) -> Dict[str, Any]:
    record = json.loads(Path(path).read_text(encoding="utf-8"))
    if "settings" not in record:
        raise ValueError(f"{path} has no 'settings' block to replay")
    return record
