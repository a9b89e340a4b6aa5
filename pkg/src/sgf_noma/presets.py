# src/sgf_noma/presets.py
"""
Figure presets, written as the same dotted key = value settings a config file uses.
Anything a preset sets can be overridden by a config file, the environment or --set.
"""
from __future__ import annotations
from typing import Dict

ALL_SCHEMES = "BU,BU-PC,CS,CS-PC,RS,RS-PC,RS-FSIC"

# per-user admission with four GF users pinned at 1..4 m
_ADMISSION = {
    "scenario.K": "4",
    "scenario.R_F": "0.9",
    "geometry.gf_distances": "1,2,3,4",
    "geometry.gb_distance": "2",
    "geometry.manual": "true",
    "sweep.snr_db": "0:5:45",
    "run.schemes": "BU,BU-PC,CS,RS",
    "run.metrics": "admission",
    "run.mode": "mc",
}

PRESETS: Dict[str, Dict[str, str]] = {
    "fig1a": {**_ADMISSION, "scenario.R_B": "1"},
    "fig1b": {**_ADMISSION, "scenario.R_B": "2"},
    # GF users fixed at 1 m, GB power pinned, GF decoded first under fixed-order SIC
    "fig2": {
        "scenario.D_F": "1",
        "scenario.D_F_inner": "1",
        "scenario.D_0": "1",
        "scenario.D_1": "3",
        "power.pin_P_B_db": "10",
        "sweep.snr_db": "10:5:50",
        "run.schemes": ALL_SCHEMES,
        "run.metrics": "outage",
        "run.mode": "mc",
        "scheme.fsic_order": "gf-first",
    },
    "fig3": {
        "scenario.D_F": "10",
        "scenario.D_0": "1",
        "scenario.D_1": "10",
        "sweep.snr_db": "0:5:45",
        "run.schemes": ALL_SCHEMES,
        "run.metrics": "ergodic_rate",
        "run.mode": "mc",
    },
    "fig4a": {
        "scenario.K": "3",
        "sweep.snr_db": "0:5:45",
        "run.schemes": "CS,CS-PC",
        "run.metrics": "outage",
        "run.mode": "both",
    },
    "fig4b": {
        "scenario.K": "3",
        "sweep.snr_db": "0:5:45",
        "run.schemes": "BU,BU-PC",
        "run.metrics": "outage",
        "run.mode": "both",
    },
    "fig5a": {
        "scenario.K": "3",
        "scenario.R_B": "1",
        "scenario.R_F": "0.9",
        "sweep.snr_db": "0:5:45",
        "run.schemes": "BU,BU-PC,CS,CS-PC",
        "run.metrics": "outage",
        "run.mode": "high-snr",
    },
    "fig5b": {
        "scenario.K": "3",
        "scenario.R_B": "1.5",
        "scenario.R_F": "0.9",
        "sweep.snr_db": "0:5:45",
        "run.schemes": "BU,BU-PC,CS,CS-PC",
        "run.metrics": "outage",
        "run.mode": "high-snr",
    },
    "fig6": {
        "sweep.K": "1,2,3",
        "sweep.snr_db": "0:5:45",
        "run.schemes": "CS,CS-PC,RS,RS-PC",
        "run.metrics": "outage",
        "run.mode": "both",
    },
    # second exponent is not given for this figure; 4 is assumed
    "fig7": {
        "scenario.K": "3",
        "sweep.rate_pairs": "1/0.5,1/0.9,1.5/0.9",
        "sweep.alpha": "3,4",
        "sweep.snr_db": "0:5:45",
        "run.schemes": "BU-PC,CS-PC",
        "run.metrics": "outage",
        "run.mode": "analytic",
    },
}


def preset_settings(name: str) -> Dict[str, str]:
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose one of {sorted(PRESETS)} or 'custom'")
    return {**PRESETS[name], "run.preset": name}
