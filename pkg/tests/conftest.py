import sys
from pathlib import Path

import pytest

# Add repo root to path so `src.sgf_noma` imports resolve
sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from src.sgf_noma.quadrature import QuadratureGrid, QuadratureOrders  # noqa: E402
from src.sgf_noma.schema import ScenarioParams  # noqa: E402


@pytest.fixture
def params() -> ScenarioParams:
    return ScenarioParams()


@pytest.fixture
def grid(params) -> QuadratureGrid:
    return QuadratureGrid.build(params)


@pytest.fixture
def fine_grid(params) -> QuadratureGrid:
    return QuadratureGrid.build(params, QuadratureOrders.uniform(80))


def at_snr(snr_db: float, **overrides) -> ScenarioParams:
    return ScenarioParams(**overrides).with_snr_db(snr_db)
