from __future__ import annotations
from typing import Optional, Tuple, Union

import numpy as np

from .schema import ChannelBatch, ChannelRealization, FixedGeometryOverride, ScenarioParams
from .validators import require_nonnegative

ArrayLike = Union[float, np.ndarray]


def radius_from_uniform(u: ArrayLike, r_in: float, r_out: float) -> ArrayLike:
    """Inverse CDF of a uniformly placed point's distance in an annulus."""
    return np.sqrt(np.asarray(u) * (r_out ** 2 - r_in ** 2) + r_in ** 2)


def path_gain(r: ArrayLike, alpha: float) -> ArrayLike:
    return 1.0 / (1.0 + np.asarray(r) ** alpha)


def sample_positions(params: ScenarioParams, rng: np.random.Generator,
                     size: Optional[int] = None) -> Tuple[ArrayLike, np.ndarray]:
    """
    GB distance on the ring [D_0, D_1] and K GF distances on [D_F_inner, D_F], all
    uniform in area. With size=None returns (float, (K,)); otherwise ((size,), (size, K)).
    """
    shape_b = () if size is None else (size,)
    shape_f = (params.K,) if size is None else (size, params.K)
    r_B = radius_from_uniform(rng.random(shape_b), params.D_0, params.D_1)
    if params.fixed_distance_gf:
        r = np.full(shape_f, params.D_F)
    else:
        r = radius_from_uniform(rng.random(shape_f), params.D_F_inner, params.D_F)
    return (float(r_B) if size is None else r_B), r


def sample_channels(params: ScenarioParams, r_B: float, r: np.ndarray,
                    rng: np.random.Generator) -> ChannelRealization:
    """One draw of Rayleigh fading on top of the given distances."""
    r = np.asarray(r, dtype=float)
    zeta_B = rng.exponential(1.0)
    zeta = rng.exponential(1.0, size=r.shape)
    return ChannelRealization(
        r_B=float(r_B),
        r=r.tolist(),
        g2=float(zeta_B * path_gain(r_B, params.alpha)),
        h2=(zeta * path_gain(r, params.alpha)).tolist(),
    )


def sample_batch(params: ScenarioParams, size: int, rng: np.random.Generator,
                 geometry: Optional[FixedGeometryOverride] = None) -> ChannelBatch:
    """`size` independent trials: fresh geometry (unless overridden) and fading in each."""
    r_B, r = sample_positions(params, rng, size=size)
    if geometry is not None:
        if geometry.gb_distance is not None:
            r_B = np.full(size, float(geometry.gb_distance))
        if geometry.gf_distances is not None:
            r = np.broadcast_to(np.asarray(geometry.gf_distances, dtype=float), (size, params.K)).copy()
    zeta_B = rng.exponential(1.0, size=size)
    zeta = rng.exponential(1.0, size=(size, params.K))
    return ChannelBatch(
        r_B=r_B,
        r=r,
        g2=zeta_B * path_gain(r_B, params.alpha),
        h2=zeta * path_gain(r, params.alpha),
    )


def conditional_cdf_gf(r_k: ArrayLike, alpha: float, x: ArrayLike) -> ArrayLike:
    """F_k(x | r_k) = 1 - exp(-(1 + r_k^alpha) x)."""
    require_nonnegative(x, "GF gain argument")
    out = -np.expm1(-(1.0 + np.asarray(r_k) ** alpha) * np.asarray(x))
    return float(out) if np.ndim(out) == 0 else out
