import numpy as np
import pytest

from src.sgf_noma.channel import sample_batch
from src.sgf_noma.schedulers import (
    BestUserScheduler, CdfScheduler, RandomScheduler, build_scheduler, cdf_scores, draw_selection,
    outage_indicator, outage_mask, schedule_bu, schedule_cs, schedule_rs,
)
from src.sgf_noma.schema import (
    ChannelRealization, Decoding, FixedGeometryOverride, PowerRule, ScenarioParams, SchemeId, SicStage,
)
from src.sgf_noma.utils import stream_rng


@pytest.fixture
def rz():
    return ChannelRealization(r_B=2.0, r=[1.0, 2.0, 3.0], g2=0.01, h2=[0.1, 0.5, 0.2])


@pytest.fixture
def p3():
    return ScenarioParams(K=3)


def test_bu_admits_highest_rate(p3, rz):
    out = schedule_bu(p3, rz)
    assert out.admitted_index == 1
    assert out.sic_stage is SicStage.FIRST
    # tau0 = 0 here, so the admitted user sees the GB interference
    assert out.gf_rate == pytest.approx(np.log2(1 + 50.0 / 2.0))


def test_cs_admits_largest_cdf_value(p3, rz):
    # (1 + r^3) h2 = 0.2, 4.5, 5.6
    assert schedule_cs(p3, rz).admitted_index == 2


def test_rs_uses_drawn_user(p3, rz):
    rng = np.random.default_rng(5)
    expected = int(np.random.default_rng(5).integers(0, 3, size=1)[0])
    assert schedule_rs(p3, rz, rng).admitted_index == expected
    fsic = schedule_rs(p3, rz, np.random.default_rng(5), decoding=Decoding.FSIC)
    assert fsic.admitted_index == expected
    assert fsic.tx_power == p3.P_F


def test_random_scheduler_requires_selection(p3):
    batch = sample_batch(p3, 10, stream_rng(0, 0, 0, 0))
    with pytest.raises(ValueError):
        RandomScheduler(p3).run(batch)


def test_build_scheduler_routes_every_scheme(params):
    kinds = {s: type(build_scheduler(s, params)).__name__ for s in SchemeId}
    assert kinds[SchemeId.BU] == "BestUserScheduler"
    assert kinds[SchemeId.CS_PC] == "CdfScheduler"
    assert kinds[SchemeId.RS_PC] == "RandomScheduler"
    assert kinds[SchemeId.RS_FSIC] == "FixedOrderScheduler"
    assert build_scheduler("BU-PC", params).power_rule is PowerRule.PC


def test_outage_indicator_is_strict(p3, rz):
    out = schedule_bu(p3, rz)
    assert outage_indicator(out, p3) == 0
    assert outage_indicator(out, ScenarioParams(K=3, R_F=out.gf_rate)) == 0
    assert outage_indicator(out, ScenarioParams(K=3, R_F=out.gf_rate + 1e-9)) == 1


@pytest.mark.parametrize("cls", [BestUserScheduler, CdfScheduler])
def test_power_control_dominates_per_realization(params, cls):
    batch = sample_batch(params.with_snr_db(15.0), 20_000, stream_rng(9, 0, 0, 0))
    p = params.with_snr_db(15.0)
    fixed = outage_mask(cls(p, PowerRule.FIXED).run(batch), p)
    pc = outage_mask(cls(p, PowerRule.PC).run(batch), p)
    assert np.all(~pc | fixed)


def test_cs_is_fair_at_fixed_distances(params):
    geo = FixedGeometryOverride(gf_distances=[1, 2, 3, 4], manual=True)
    batch = sample_batch(params, 40_000, stream_rng(2, 0, 0, 0), geo)
    cs = CdfScheduler(params).run(batch)
    freq = np.bincount(cs.admitted, minlength=4) / batch.size
    assert np.allclose(freq, 0.25, atol=0.01)
    bu = BestUserScheduler(params).run(batch)
    freq_bu = np.bincount(bu.admitted, minlength=4) / batch.size
    assert np.all(np.diff(freq_bu) < 0)


def test_scores_rank_like_conditional_cdf(params):
    batch = sample_batch(params, 100, stream_rng(4, 0, 0, 0))
    cdf = -np.expm1(-(1 + batch.r ** params.alpha) * batch.h2)
    assert np.array_equal(np.argmax(cdf_scores(batch, params.alpha), axis=1), np.argmax(cdf, axis=1))


def test_selection_shares_stream():
    a = draw_selection(stream_rng(1, 0, 0, 1), 20, 4)
    b = draw_selection(stream_rng(1, 0, 0, 1), 20, 4)
    assert np.array_equal(a, b) and a.min() >= 0 and a.max() < 4
