from __future__ import annotations
from typing import Callable, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .schema import ScenarioParams
from .validators import clamp_probability, require_nonnegative

ArrayLike = Union[float, np.ndarray]


class QuadratureOrders(BaseModel):
    """Complexity/accuracy knobs: L, N for the region averages, I, J, M for the outer integrals."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    L: int = Field(10, ge=1)
    N: int = Field(10, ge=1)
    I: int = Field(10, ge=1)
    J: int = Field(10, ge=1)
    M: int = Field(10, ge=1)

    @classmethod
    def uniform(cls, order: int) -> "QuadratureOrders":
        return cls(L=order, N=order, I=order, J=order, M=order)


def chebyshev_nodes(order: int) -> np.ndarray:
    i = np.arange(1, order + 1)
    return np.cos((2 * i - 1) * np.pi / (2 * order))


def gauss_chebyshev(fn: Callable[[np.ndarray], np.ndarray], lower: float, upper: float, order: int) -> float:
    """(upper-lower)/2 * sum W sqrt(1-theta^2) fn(node), W = pi/order; fn must accept an array."""
    theta = chebyshev_nodes(order)
    half = 0.5 * (upper - lower)
    nodes = half * theta + 0.5 * (upper + lower)
    weights = (np.pi / order) * np.sqrt(1.0 - theta ** 2)
    return float(half * np.sum(weights * fn(nodes)))


class QuadratureGrid(BaseModel):
    """
    Precomputed Gauss-Chebyshev constants for one scenario.

    psi/mu are the GF-region weights and exponents (index l = 1..L); psi_ext/mu_ext
    prepend the extended index l = 0 with Psi_0 = -2, mu_0 = 0 used by the tail
    H-terms. phi/c are the GB-ring weights and exponents (n = 1..N).
    With normalize_weights the weights are rescaled so that 1/2 sum Psi = 1 and
    1/(D_0+D_1) sum Phi = 1 hold exactly.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    L: int
    N: int
    I: int
    J: int
    M: int
    psi: np.ndarray
    mu: np.ndarray
    phi: np.ndarray
    c: np.ndarray
    D_B_sum: float
    normalized: bool = True

    @classmethod
    def build(cls, params: ScenarioParams, orders: QuadratureOrders | None = None,
              normalize_weights: bool = True) -> "QuadratureGrid":
        orders = orders or QuadratureOrders()
        a = params.alpha

        if params.fixed_distance_gf:
            # every GF user sits at D_F
            psi = np.array([2.0])
            mu = np.array([1.0 + params.D_F ** a])
        else:
            t = chebyshev_nodes(orders.L)
            lo, hi = params.D_F_inner, params.D_F
            rho = 0.5 * (hi + lo) + 0.5 * (hi - lo) * t
            psi = (2.0 / (hi + lo)) * (np.pi / orders.L) * np.sqrt(1.0 - t ** 2) * rho
            mu = 1.0 + rho ** a

        v = chebyshev_nodes(orders.N)
        d_sum = params.D_1 + params.D_0
        phi_n = 0.5 * d_sum + 0.5 * (params.D_1 - params.D_0) * v
        phi = (np.pi / orders.N) * np.sqrt(1.0 - v ** 2) * phi_n
        c = 1.0 + phi_n ** a

        if normalize_weights:
            psi = psi * (2.0 / psi.sum())
            phi = phi * (d_sum / phi.sum())

        return cls(
            L=len(psi), N=orders.N, I=orders.I, J=orders.J, M=orders.M,
            psi=psi, mu=mu, phi=phi, c=c, D_B_sum=d_sum, normalized=normalize_weights,
        )

    # derived constants

    @property
    def psi_ext(self) -> np.ndarray:
        return np.concatenate(([-2.0], self.psi))

    @property
    def mu_ext(self) -> np.ndarray:
        return np.concatenate(([0.0], self.mu))

    @property
    def w_B(self) -> np.ndarray:
        """Phi_n / (D_0 + D_1)."""
        return self.phi / self.D_B_sum

    @property
    def S_F(self) -> float:
        return float(0.5 * np.sum(self.psi * self.mu))

    @property
    def S_B(self) -> float:
        return float(np.sum(self.w_B * self.c))

    def gf_moment(self, K: int) -> float:
        """1/2 sum Psi mu^K, the GF-side constant of the CS high-SNR terms."""
        return float(0.5 * np.sum(self.psi * self.mu ** K))

    # raw vectorized forms (no validation, no clamping)

    def gf_cdf(self, x: ArrayLike) -> np.ndarray:
        x = np.asarray(x, dtype=float)[..., None]
        return 0.5 * np.sum(self.psi * -np.expm1(-self.mu * x), axis=-1)

    def gf_pdf(self, x: ArrayLike) -> np.ndarray:
        x = np.asarray(x, dtype=float)[..., None]
        return 0.5 * np.sum(self.psi * self.mu * np.exp(-self.mu * x), axis=-1)

    def gf_increment(self, a: ArrayLike, b: ArrayLike) -> np.ndarray:
        """F_F(b) - F_F(a) for a <= b, without cancellation."""
        a = np.asarray(a, dtype=float)[..., None]
        b = np.asarray(b, dtype=float)[..., None]
        return 0.5 * np.sum(self.psi * np.exp(-self.mu * a) * -np.expm1(-self.mu * (b - a)), axis=-1)

    def gf_extended(self, x: ArrayLike) -> np.ndarray:
        x = np.asarray(x, dtype=float)[..., None]
        return -0.5 * np.sum(self.psi_ext * np.exp(-self.mu_ext * x), axis=-1)

    def cs_cdf(self, x: ArrayLike, K: int) -> np.ndarray:
        x = np.asarray(x, dtype=float)[..., None]
        return 0.5 * np.sum(self.psi * (-np.expm1(-self.mu * x)) ** K, axis=-1)

    def gb_cdf(self, y: ArrayLike) -> np.ndarray:
        y = np.asarray(y, dtype=float)[..., None]
        return np.sum(self.w_B * -np.expm1(-self.c * y), axis=-1)

    def gb_sf(self, y: ArrayLike) -> np.ndarray:
        """1 - F_B(y), written so it stays accurate for large y."""
        y = np.asarray(y, dtype=float)[..., None]
        return (1.0 - np.sum(self.w_B)) + np.sum(self.w_B * np.exp(-self.c * y), axis=-1)

    def gb_pdf(self, y: ArrayLike) -> np.ndarray:
        y = np.asarray(y, dtype=float)[..., None]
        return np.sum(self.w_B * self.c * np.exp(-self.c * y), axis=-1)


# ───────────────────────────────────────────────────────────
# Public CDF / pdf operations
# ───────────────────────────────────────────────────────────

def _out(value: np.ndarray, like: ArrayLike) -> ArrayLike:
    return float(value) if np.ndim(like) == 0 else value


def cdf_gf_unordered(grid: QuadratureGrid, x: ArrayLike) -> ArrayLike:
    require_nonnegative(x, "GF gain argument")
    return _out(clamp_probability(grid.gf_cdf(x), "cdf_gf_unordered"), x)


def cdf_gf_increment(grid: QuadratureGrid, a: ArrayLike, b: ArrayLike) -> ArrayLike:
    require_nonnegative(a, "lower GF gain")
    if np.any(np.asarray(b) < np.asarray(a)):
        raise ValueError("increment needs a <= b")
    return _out(clamp_probability(grid.gf_increment(a, b), "cdf_gf_increment"), b)


def cdf_gf_extended(grid: QuadratureGrid, x: ArrayLike) -> ArrayLike:
    require_nonnegative(x, "GF gain argument")
    return _out(grid.gf_extended(x), x)


def cdf_gb(grid: QuadratureGrid, y: ArrayLike) -> ArrayLike:
    require_nonnegative(y, "GB gain argument")
    return _out(clamp_probability(grid.gb_cdf(y), "cdf_gb"), y)


def pdf_gb(grid: QuadratureGrid, y: ArrayLike) -> ArrayLike:
    require_nonnegative(y, "GB gain argument")
    return _out(np.maximum(grid.gb_pdf(y), 0.0), y)


def cdf_cs_scheduled(grid: QuadratureGrid, x: ArrayLike, K: int) -> ArrayLike:
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    require_nonnegative(x, "GF gain argument")
    return _out(clamp_probability(grid.cs_cdf(x, K), "cdf_cs_scheduled"), x)
