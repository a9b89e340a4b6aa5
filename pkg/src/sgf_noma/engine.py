"""
Monte Carlo engine.

Every sweep point is split into fixed-size chunks; chunk c of point p draws channels from
stream (seed, p, c, 0) and random selections from (seed, p, c, 1), so estimates do not
depend on how chunks are spread over workers. All schemes of a plan are scheduled on the
same channel batch.
"""
from __future__ import annotations
from typing import Any, Dict, List, Optional, Sequence
import logging
import time

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict, Field
from tqdm import tqdm

from .analytic import evaluate
from .channel import sample_batch
from .metrics import SchemeTally, RunningStats, tally_estimates
from .oracle import numeric_oracle
from .quadrature import QuadratureGrid, QuadratureOrders
from .schedulers import build_scheduler, draw_selection, gb_outage_mask, outage_mask
from .schema import AnalyticMode, AnalyticRequest, ExperimentPlan, ScenarioParams, SchemeId, SweepPoint
from .utils import stream_rng

log = logging.getLogger("sgf")

CHANNEL_STREAM = 0
SELECTION_STREAM = 1


class SweepPointError(RuntimeError):
    """A sweep point failed; carries its index and overrides."""

    def __init__(self, point_index: int, point: SweepPoint, cause: BaseException):
        self.point_index = point_index
        self.point = point
        self.cause = cause
        overrides = {k: v for k, v in point.model_dump().items() if v is not None}
        super().__init__(f"sweep point {point_index} {overrides} failed: {type(cause).__name__}: {cause}")


class PointResult(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    point_index: int
    point: SweepPoint
    params: ScenarioParams
    estimates: Dict[SchemeId, Dict[str, Any]] = Field(default_factory=dict)
    analytic: Dict[AnalyticMode, Dict[SchemeId, float]] = Field(default_factory=dict)
    elapsed_s: float = 0.0


def chunk_sizes(trials: int, chunk_size: int) -> List[int]:
    full, rem = divmod(trials, chunk_size)
    return [chunk_size] * full + ([rem] if rem else [])


def _simulate_chunk(plan: ExperimentPlan, params: ScenarioParams, point_index: int,
                    chunk_index: int, size: int) -> Dict[str, SchemeTally]:
    """One chunk for every scheme of the plan. Module-level so worker processes can import it."""
    batch = sample_batch(params, size, stream_rng(plan.master_seed, point_index, chunk_index, CHANNEL_STREAM),
                         plan.geometry)
    selection = draw_selection(stream_rng(plan.master_seed, point_index, chunk_index, SELECTION_STREAM),
                               size, params.K)
    out: Dict[str, SchemeTally] = {}
    for scheme in plan.schemes:
        outcomes = build_scheduler(scheme, params, plan.fsic_order).run(batch, selection)
        out[scheme.value] = SchemeTally(
            trials=size,
            outage=int(np.count_nonzero(outage_mask(outcomes, params))),
            gb_outage=int(np.count_nonzero(gb_outage_mask(outcomes, params))),
            admission=np.bincount(outcomes.admitted, minlength=params.K).tolist(),
            rate=RunningStats.of(outcomes.gf_rate),
        )
    return out


class Engine:
    """Runs an ExperimentPlan point by point; analytic companions are evaluated on request."""

    def __init__(self, plan: ExperimentPlan, workers: int = 1, orders: Optional[QuadratureOrders] = None,
                 progress: bool = False):
        self.plan = plan
        self.workers = max(int(workers), 1)
        self.orders = orders or QuadratureOrders()
        self.progress = progress
        self.failures: List[SweepPointError] = []

    # ── simulation ──

    def simulate(self, point_index: int, params: ScenarioParams) -> Dict[SchemeId, SchemeTally]:
        sizes = chunk_sizes(self.plan.trials, self.plan.chunk_size)
        if self.workers == 1 or len(sizes) == 1:
            chunks = [_simulate_chunk(self.plan, params, point_index, c, n) for c, n in enumerate(sizes)]
        else:
            chunks = Parallel(n_jobs=self.workers)(
                delayed(_simulate_chunk)(self.plan, params, point_index, c, n) for c, n in enumerate(sizes)
            )
        merged: Dict[SchemeId, SchemeTally] = {s: SchemeTally() for s in self.plan.schemes}
        for chunk in chunks:
            for s in self.plan.schemes:
                merged[s] = merged[s].merge(chunk[s.value])
        return merged

    # ── analytic companions ──

    def analytic(self, params: ScenarioParams, modes: Sequence[AnalyticMode]) -> Dict[AnalyticMode, Dict[SchemeId, float]]:
        out: Dict[AnalyticMode, Dict[SchemeId, float]] = {}
        grid = QuadratureGrid.build(params, self.orders) if modes else None
        for mode in modes:
            values: Dict[SchemeId, float] = {}
            for scheme in self.plan.schemes:
                if mode is AnalyticMode.ORACLE:
                    values[scheme] = numeric_oracle(scheme, params, fsic_order=self.plan.fsic_order).value
                elif scheme.fsic:
                    continue  # oracle only
                else:
                    values[scheme] = evaluate(AnalyticRequest(scheme=scheme, params=params, grid=grid, mode=mode))
            out[mode] = values
        return out

    # ── points ──

    def run_point(self, point_index: int, point: Optional[SweepPoint] = None, simulate: bool = True,
                  analytic_modes: Sequence[AnalyticMode] = ()) -> PointResult:
        point = point or SweepPoint()
        params = self.plan.point_params(point)
        started = time.perf_counter()
        estimates: Dict[SchemeId, Dict[str, Any]] = {}
        if simulate:
            for scheme, tally in self.simulate(point_index, params).items():
                estimates[scheme] = tally_estimates(tally, self.plan.metrics)
        analytic = self.analytic(params, list(analytic_modes))
        elapsed = time.perf_counter() - started
        log.debug(f"[sgf] point {point_index} done in {elapsed:.2f}s")
        return PointResult(
            point_index=point_index, point=point, params=params,
            estimates=estimates, analytic=analytic, elapsed_s=elapsed,
        )

    def run_sweep(self, simulate: bool = True, analytic_modes: Sequence[AnalyticMode] = (),
                  on_error: str = "raise") -> List[PointResult]:
        """All points in plan order. on_error='record' keeps going and collects SweepPointError in `failures`."""
        if on_error not in ("raise", "record"):
            raise ValueError(f"on_error must be 'raise' or 'record', got {on_error!r}")
        self.failures = []
        results: List[PointResult] = []
        points = self.plan.points()
        for i, point in enumerate(tqdm(points, desc="sweep", unit="pt", disable=not self.progress)):
            try:
                results.append(self.run_point(i, point, simulate=simulate, analytic_modes=analytic_modes))
            except Exception as e:
                err = SweepPointError(i, point, e)
                if on_error == "raise":
                    raise err from e
                log.warning(f"[sgf] {err}")
                self.failures.append(err)
        return results


def run_point(plan: ExperimentPlan, point: Optional[SweepPoint] = None, workers: int = 1) -> Dict[SchemeId, Dict[str, Any]]:
    """Monte Carlo estimates at one point: scheme -> metric -> MetricEstimate."""
    return Engine(plan, workers).run_point(0, point).estimates


def run_sweep(plan: ExperimentPlan, workers: int = 1, analytic_modes: Sequence[AnalyticMode] = ()) -> List[PointResult]:
    return Engine(plan, workers).run_sweep(analytic_modes=analytic_modes)
