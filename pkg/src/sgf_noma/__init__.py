# src/sgf_noma/__init__.py
from __future__ import annotations

__version__ = "0.1.0"

__all__ = [
    "schema", "channel", "decoding", "schedulers", "quadrature", "analytic", "asymptotics",
    "oracle", "metrics", "engine", "presets", "config", "export_csv",
]
