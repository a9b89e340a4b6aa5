import numpy as np
import pytest
from scipy.integrate import quad

from src.sgf_noma.oracle import ExactDistributions
from src.sgf_noma.quadrature import (
    QuadratureGrid, QuadratureOrders, cdf_cs_scheduled, cdf_gb, cdf_gf_extended, cdf_gf_increment,
    cdf_gf_unordered, gauss_chebyshev, pdf_gb,
)
from src.sgf_noma.schema import ScenarioParams


def test_normalized_weights_sum_exactly(grid):
    assert 0.5 * grid.psi.sum() == pytest.approx(1.0, abs=1e-14)
    assert grid.w_B.sum() == pytest.approx(1.0, abs=1e-14)
    assert grid.L == 10 and grid.N == 10


def test_raw_weights_are_close_but_not_exact(params):
    raw = QuadratureGrid.build(params, normalize_weights=False)
    assert not raw.normalized
    assert 0.5 * raw.psi.sum() == pytest.approx(1.0, rel=2e-2)


def test_gauss_chebyshev_converges_on_constant():
    assert gauss_chebyshev(lambda x: np.ones_like(x), 0.0, 1.0, 10) == pytest.approx(1.0, rel=1e-2)
    assert gauss_chebyshev(lambda x: np.ones_like(x), 0.0, 1.0, 200) == pytest.approx(1.0, rel=1e-4)


def test_gf_cdf_limits_and_monotone(grid):
    assert cdf_gf_unordered(grid, 0.0) == 0.0
    xs = np.linspace(0.0, 2.0, 50)
    values = cdf_gf_unordered(grid, xs)
    assert np.all(np.diff(values) >= 0)
    assert cdf_gf_unordered(grid, 1e3) == pytest.approx(1.0, abs=1e-12)


def test_gf_cdf_matches_adaptive_integration(params, fine_grid):
    exact = ExactDistributions(params).gf_cdf(0.5)
    direct, _ = quad(lambda r: (1 - np.exp(-(1 + r ** 3) * 0.5)) * r, 0, 3)
    assert exact == pytest.approx(2 / 9 * direct, abs=1e-10)
    assert cdf_gf_unordered(fine_grid, 0.5) == pytest.approx(exact, abs=1e-4)


def test_gb_cdf_matches_adaptive_integration(params, fine_grid):
    exact = ExactDistributions(params).gb_cdf(0.3)
    assert cdf_gb(fine_grid, 0.3) == pytest.approx(exact, abs=1e-4)


def test_gb_pdf_integrates_to_one(grid):
    total, _ = quad(lambda y: pdf_gb(grid, y), 0, np.inf)
    assert total == pytest.approx(1.0, abs=1e-6)


def test_increment_equals_difference(grid):
    a, b = 0.01, 0.2
    diff = cdf_gf_unordered(grid, b) - cdf_gf_unordered(grid, a)
    assert cdf_gf_increment(grid, a, b) == pytest.approx(diff, abs=1e-14)
    with pytest.raises(ValueError):
        cdf_gf_increment(grid, b, a)


def test_extended_form_equals_cdf_when_normalized(grid):
    xs = np.array([0.0, 0.05, 0.3, 1.0])
    assert np.allclose(cdf_gf_extended(grid, xs), cdf_gf_unordered(grid, xs), atol=1e-14)


def test_scheduled_cdf(grid):
    assert cdf_cs_scheduled(grid, 0.2, 1) == pytest.approx(cdf_gf_unordered(grid, 0.2))
    assert cdf_cs_scheduled(grid, 0.2, 3) < cdf_gf_unordered(grid, 0.2)
    with pytest.raises(ValueError):
        cdf_cs_scheduled(grid, 0.2, 0)


def test_negative_arguments_rejected(grid):
    with pytest.raises(ValueError):
        cdf_gf_unordered(grid, -0.1)
    with pytest.raises(ValueError):
        cdf_gb(grid, -1.0)


def test_fixed_distance_grid_is_exponential():
    params = ScenarioParams(D_F=2.0, D_F_inner=2.0)
    grid = QuadratureGrid.build(params)
    assert grid.L == 1
    assert cdf_gf_unordered(grid, 0.1) == pytest.approx(1 - np.exp(-9 * 0.1))


def test_annulus_grid_matches_adaptive_integration():
    params = ScenarioParams(D_F=3.0, D_F_inner=1.0)
    grid = QuadratureGrid.build(params, QuadratureOrders.uniform(80))
    assert cdf_gf_unordered(grid, 0.2) == pytest.approx(ExactDistributions(params).gf_cdf(0.2), abs=1e-4)
