import numpy as np
import pandas as pd
import pytest

from src.sgf_noma.metrics import (
    RunningStats, SchemeTally, empirical_diversity_slope, mean_estimate, proportion_estimate, tally_estimates,
    wilson_interval,
)


def test_wilson_interval_brackets_and_stays_in_unit_range():
    low, high = wilson_interval(0, 100)
    assert low == pytest.approx(0.0, abs=1e-12) and 0.0 < high < 0.05
    low, high = wilson_interval(50, 100)
    assert low < 0.5 < high
    assert (low + high) / 2 == pytest.approx(0.5)
    with pytest.raises(ValueError):
        wilson_interval(0, 0)


def test_proportion_estimate():
    est = proportion_estimate(25, 100)
    assert est.point == 0.25 and est.trials == 100
    assert est.std_error == pytest.approx(np.sqrt(0.25 * 0.75 / 100))
    assert est.ci95_low < 0.25 < est.ci95_high


def test_running_stats_merge_matches_single_pass():
    values = np.linspace(0.0, 3.0, 101)
    whole = RunningStats.of(values)
    split = RunningStats.of(values[:40]).merge(RunningStats.of(values[40:]))
    assert split.n == whole.n
    assert split.mean == pytest.approx(values.mean())
    assert split.variance == pytest.approx(values.var(ddof=1))
    est = mean_estimate(split)
    assert est.ci95_low < est.point < est.ci95_high
    with pytest.raises(ValueError):
        mean_estimate(RunningStats())


def test_scheme_tally_merge_and_estimates():
    a = SchemeTally(trials=10, outage=2, gb_outage=1, admission=[6, 4], rate=RunningStats.of(np.ones(10)))
    b = SchemeTally(trials=30, outage=3, gb_outage=0, admission=[10, 20], rate=RunningStats.of(np.zeros(30)))
    merged = SchemeTally().merge(a).merge(b)
    assert merged.trials == 40 and merged.outage == 5 and merged.admission == [16, 24]
    out = tally_estimates(merged, ["outage", "admission", "ergodic_rate", "gb_outage"])
    assert out["outage"].point == pytest.approx(0.125)
    assert [e.point for e in out["admission"]] == [0.4, 0.6]
    assert out["ergodic_rate"].point == pytest.approx(0.25)
    assert out["gb_outage"].point == pytest.approx(0.025)


def test_slope_of_synthetic_curve():
    table = {s: 10.0 ** (-2.0 * s / 10.0) for s in (20.0, 25.0, 30.0, 35.0)}
    assert empirical_diversity_slope(table) == pytest.approx(2.0)
    frame = pd.DataFrame({"snr_db": list(table), "value": list(table.values())})
    assert empirical_diversity_slope(frame, top_points=4) == pytest.approx(2.0)


def test_slope_ignores_zero_outage_and_needs_two_points():
    table = {10.0: 1e-2, 20.0: 1e-3, 30.0: 0.0}
    assert empirical_diversity_slope(table) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        empirical_diversity_slope({10.0: 1e-2, 20.0: 0.0})
