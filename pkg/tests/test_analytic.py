import logging

import numpy as np
import pytest
from pydantic import ValidationError

from conftest import at_snr
from src.sgf_noma.analytic import (
    bu_terms, compositions, cs_terms, diversity_order, evaluate, h_term, outage_bu, outage_bu_pc,
    outage_cs, outage_cs_pc,
)
from src.sgf_noma.oracle import (
    GridDistributions, bu_integral_terms, bu_tail_integral, cs_integral_terms, numeric_oracle,
)
from src.sgf_noma.quadrature import QuadratureGrid, QuadratureOrders
from src.sgf_noma.schema import AnalyticMode, AnalyticRequest, ScenarioParams, SchemeId

ORDER_40 = QuadratureOrders.uniform(40)
ORDER_80 = QuadratureOrders.uniform(80)


def test_compositions_cover_multinomial():
    counts, coef = compositions(2, 3)
    assert counts.shape == (6, 3)
    assert np.all(counts.sum(axis=1) == 2)
    assert coef.sum() == 9.0  # 3^2


@pytest.mark.parametrize("R_B", [1.0, 1.5])
def test_cs_terms_match_integral_forms(R_B):
    p = at_snr(20.0, K=3, R_B=R_B)
    grid = QuadratureGrid.build(p)
    closed = cs_terms(p, grid)
    numeric = cs_integral_terms(p, GridDistributions(grid))
    for key in ("first_stage", "correction", "tail"):
        assert closed[key] == pytest.approx(numeric.terms[key], abs=1e-7), key
    assert outage_cs(p, grid) == pytest.approx(numeric.value, abs=1e-7)


def test_tail_h_term_matches_integration():
    # gamma_B * gamma_F = 1: super-unity, alpha_2 is infinite
    p = at_snr(20.0, K=2, R_B=1.0, R_F=1.0)
    grid = QuadratureGrid.build(p, QuadratureOrders(L=2))
    dist = GridDistributions(grid)
    for k in range(p.K + 1):
        assert h_term(p, grid, k) == pytest.approx(bu_tail_integral(p, dist, k).value, abs=1e-6), k


@pytest.mark.parametrize("power_control", [False, True])
def test_bu_terms_match_integral_forms(power_control):
    p = at_snr(20.0, K=2)
    grid = QuadratureGrid.build(p, ORDER_40)
    closed = bu_terms(p, grid, power_control)
    numeric = bu_integral_terms(p, GridDistributions(grid), power_control).terms
    for k, value in enumerate(closed["G1"]):
        assert value == pytest.approx(numeric[f"G1[{k}]"], abs=1e-5)
    assert closed["G3"] == pytest.approx(numeric["G3"], abs=1e-5)


@pytest.mark.parametrize("scheme, fn", [
    (SchemeId.BU, outage_bu), (SchemeId.BU_PC, outage_bu_pc),
    (SchemeId.CS, outage_cs), (SchemeId.CS_PC, outage_cs_pc),
])
@pytest.mark.parametrize("K", [2, 3])
@pytest.mark.parametrize("R_B", [1.0, 1.5])
def test_closed_forms_match_oracle(scheme, fn, K, R_B):
    p = at_snr(15.0, K=K, R_B=R_B)
    grid = QuadratureGrid.build(p, ORDER_80)
    oracle = numeric_oracle(scheme, p, GridDistributions(grid))
    assert oracle.converged
    assert fn(p, grid) == pytest.approx(oracle.value, abs=1e-4)


def test_bu_needs_two_users():
    p = ScenarioParams(K=1)
    grid = QuadratureGrid.build(p)
    with pytest.raises(ValueError):
        outage_bu(p, grid)
    with pytest.raises(ValueError):
        outage_bu_pc(p, grid)


def test_outage_decreases_with_snr():
    values = [outage_cs_pc(p, QuadratureGrid.build(p)) for p in (at_snr(s, K=2) for s in range(0, 50, 10))]
    assert all(0.0 <= v <= 1.0 for v in values)
    assert all(a >= b for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("snr", [10.0, 20.0, 30.0])
def test_power_control_never_hurts(snr):
    p = at_snr(snr, K=3)
    grid = QuadratureGrid.build(p)
    assert outage_cs_pc(p, grid) <= outage_cs(p, grid) + 1e-12


def test_diversity_orders():
    assert diversity_order(ScenarioParams(R_B=1, R_F=1), SchemeId.BU) == 0
    assert diversity_order(ScenarioParams(K=4), SchemeId.CS_PC) == 4
    assert diversity_order(ScenarioParams(K=1), SchemeId.CS) == 1
    assert diversity_order(ScenarioParams(K=4), SchemeId.RS) == 1
    assert diversity_order(ScenarioParams(K=4), SchemeId.RS_FSIC) == 0


def test_random_selection_equals_single_user_cs(params, grid):
    rs = evaluate(AnalyticRequest(scheme=SchemeId.RS, params=params, grid=grid))
    single = ScenarioParams(**{**params.model_dump(), "K": 1})
    assert rs == pytest.approx(outage_cs(single, grid))
    # BU with one user reduces to the same value
    bu1 = evaluate(AnalyticRequest(scheme=SchemeId.BU, params=single, grid=grid))
    assert bu1 == pytest.approx(rs)


def test_single_user_bu_matches_oracle():
    p = at_snr(15.0, K=1)
    grid = QuadratureGrid.build(p, ORDER_40)
    value = evaluate(AnalyticRequest(scheme=SchemeId.BU, params=p, grid=grid))
    assert value == pytest.approx(numeric_oracle(SchemeId.BU, p, GridDistributions(grid)).value, abs=1e-7)


def test_fsic_is_oracle_only(params):
    with pytest.raises(ValidationError):
        AnalyticRequest(scheme=SchemeId.RS_FSIC, params=params, mode=AnalyticMode.EXACT)
    req = AnalyticRequest(scheme=SchemeId.RS_FSIC, params=params, mode=AnalyticMode.ORACLE)
    assert 0.0 < evaluate(req) < 1.0


def test_more_users_lower_pc_outage():
    values = [outage_cs_pc(p, QuadratureGrid.build(p)) for p in (at_snr(20.0, K=k) for k in (1, 2, 3, 4))]
    assert all(a > b for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("fn", [outage_bu_pc, outage_cs_pc])
@pytest.mark.parametrize("alpha", [3.0, 4.0])
def test_rate_pairs_sharing_r_f_superimpose(fn, alpha):
    # with power control the high-SNR outage depends on R_F only
    low, high = (at_snr(45.0, K=3, alpha=alpha, R_B=r_b, R_F=0.9) for r_b in (1.0, 1.5))
    grid = QuadratureGrid.build(low)
    assert fn(high, grid) == pytest.approx(fn(low, grid), rel=0.05)


def test_rounding_limited_cs_outage_is_flagged(caplog):
    caplog.set_level(logging.WARNING, logger="sgf")
    p = at_snr(20.0, K=2)
    outage_cs(p, QuadratureGrid.build(p))
    assert not caplog.records
    p = at_snr(70.0, K=4)
    outage_cs(p, QuadratureGrid.build(p))
    assert any("outage_cs" in r.getMessage() and "rounding" in r.getMessage() for r in caplog.records)
