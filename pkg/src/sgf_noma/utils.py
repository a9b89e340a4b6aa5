from __future__ import annotations
from typing import Dict, List, Tuple
import hashlib
import json
import math

import numpy as np


# Units

def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(p: float) -> float:
    return 10.0 * math.log10(p)


def log2_1p(x: np.ndarray) -> np.ndarray:
    """log2(1 + x) without losing precision for small x."""
    return np.log1p(x) / math.log(2.0)


# Random streams

def stream_rng(master_seed: int, point: int, chunk: int, stream: int) -> np.random.Generator:
    """Counter-derived stream: the same key always yields the same draws, whatever the worker layout."""
    ss = np.random.SeedSequence([int(master_seed), int(point), int(chunk), int(stream)])
    return np.random.Generator(np.random.Philox(ss))


# Hashing

def config_hash(settings: Dict[str, str]) -> str:
    """Stable settings hash (first 16 hex chars of SHA-256)."""
    h = hashlib.sha256(json.dumps(settings, sort_keys=True).encode("utf-8"))
    return h.hexdigest()[:16]


# Value parsing for key=value configs

def parse_range(text: str) -> List[float]:
    """'0:5:45' -> [0, 5, ..., 45] (inclusive); '10,20' -> [10, 20]."""
    text = text.strip()
    if ":" in text:
        parts = [float(x) for x in text.split(":")]
        if len(parts) != 3:
            raise ValueError(f"range must be start:step:stop, got {text!r}")
        start, step, stop = parts
        if step <= 0 or stop < start:
            raise ValueError(f"empty or reversed range {text!r}")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 10) for i in range(n)]
    return parse_float_list(text)


def parse_float_list(text: str) -> List[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def parse_int_list(text: str) -> List[int]:
    out = []
    for x in text.split(","):
        if not x.strip():
            continue
        v = float(x)
        if v != int(v):
            raise ValueError(f"expected an integer, got {x!r}")
        out.append(int(v))
    return out


def parse_rate_pairs(text: str) -> List[Tuple[float, float]]:
    """'1/0.5,1/0.9' -> [(1.0, 0.5), (1.0, 0.9)] as (R_B, R_F)."""
    pairs = []
    for chunk in text.split(","):
        if not chunk.strip():
            continue
        rb, sep, rf = chunk.partition("/")
        if not sep:
            raise ValueError(f"rate pair must be R_B/R_F, got {chunk!r}")
        pairs.append((float(rb), float(rf)))
    return pairs
