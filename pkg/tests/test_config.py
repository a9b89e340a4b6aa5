import pytest
from pydantic import ValidationError

from src.sgf_noma.config import (
    RunMode, env_settings, parse_config, parse_overrides, parse_settings, read_config_file,
)
from src.sgf_noma.presets import PRESETS, preset_settings
from src.sgf_noma.schema import AnalyticMode, FsicOrder, SchemeId, SweepPoint
from src.sgf_noma.utils import parse_range


def _write(tmp_path, text):
    path = tmp_path / "run.cfg"
    path.write_text(text, encoding="utf-8")
    return path


def test_range_parsing():
    assert parse_range("0:5:45") == [float(x) for x in range(0, 50, 5)]
    assert parse_range("10, 20") == [10.0, 20.0]
    with pytest.raises(ValueError):
        parse_range("10:5:0")


def test_every_preset_parses():
    for name in PRESETS:
        config = parse_config(overrides={"run.preset": name})
        assert config.preset == name
        assert config.plan.schemes


def test_fig7_sweep_order():
    config = parse_config(overrides={"run.preset": "fig7"})
    points = config.plan.points()
    assert len(points) == 60
    assert points[0] == SweepPoint(snr_db=0.0, alpha=3.0, R_B=1.0, R_F=0.5)
    assert points[9] == SweepPoint(snr_db=45.0, alpha=3.0, R_B=1.0, R_F=0.5)
    assert points[10].alpha == 4.0 and points[10].snr_db == 0.0
    assert (points[-1].R_B, points[-1].R_F, points[-1].alpha) == (1.5, 0.9, 4.0)
    assert config.mode is RunMode.ANALYTIC


def test_fig2_pins_gb_power():
    plan = parse_config(overrides={"run.preset": "fig2"}).plan
    for snr in (10.0, 30.0, 50.0):
        params = plan.point_params(SweepPoint(snr_db=snr))
        assert params.P_B == pytest.approx(10.0)
        assert params.P_F == pytest.approx(10.0 ** (snr / 10.0))


def test_fig2_decodes_gf_first_at_fixed_distance():
    plan = parse_config(overrides={"run.preset": "fig2"}).plan
    assert plan.fsic_order is FsicOrder.GF_FIRST
    params = plan.point_params(SweepPoint(snr_db=30.0))
    assert params.fixed_distance_gf
    assert params.D_F == params.D_F_inner == 1.0


def test_custom_config_needs_schemes_and_snr():
    with pytest.raises(ValueError, match="sweep.snr_db"):
        parse_config(overrides={"run.schemes": "CS"})
    with pytest.raises(ValueError, match="run.schemes"):
        parse_config()


def test_unknown_key_is_rejected(tmp_path):
    with pytest.raises(ValueError, match="scenario.k"):
        parse_config(_write(tmp_path, "scenario.k = 3\n"))
    with pytest.raises(ValueError):
        parse_settings({"run.schemes": "CS", "run.colour": "blue"})


def test_file_comments_and_blank_lines(tmp_path):
    path = _write(tmp_path, "# a run\n\nrun.schemes = CS, RS   # two schemes\nsweep.snr_db = 0:10:20\n")
    assert read_config_file(path) == {"run.schemes": "CS, RS", "sweep.snr_db": "0:10:20"}
    config = parse_config(path)
    assert config.plan.schemes == [SchemeId.CS, SchemeId.RS]
    assert [p.snr_db for p in config.plan.points()] == [0.0, 10.0, 20.0]
    with pytest.raises(ValueError):
        read_config_file(_write(tmp_path, "run.schemes CS\n"))


def test_precedence_preset_file_env_overrides(tmp_path):
    path = _write(tmp_path, "run.preset = fig4a\nrun.trials = 500\nrun.seed = 3\nrun.workers = 2\n")
    environ = {"SGF_SEED": "11", "SGF_WORKERS": "4", "UNRELATED": "x"}
    config = parse_config(path, overrides=parse_overrides(["run.workers=3"]), environ=environ)
    assert config.plan.schemes == [SchemeId.CS, SchemeId.CS_PC]  # preset
    assert config.plan.trials == 500  # file
    assert config.plan.master_seed == 11  # env over file
    assert config.workers == 3  # override over env
    assert env_settings(environ) == {"run.seed": "11", "run.workers": "4"}


def test_settings_replay_gives_same_hash():
    config = parse_config(overrides={"run.preset": "fig6", "run.trials": "100"})
    again = parse_settings(config.settings)
    assert again.hash == config.hash
    assert again.plan == config.plan


def test_bu_with_one_user_rejected_in_closed_form_modes():
    base = {"run.schemes": "BU", "sweep.snr_db": "10", "scenario.K": "1"}
    assert parse_config(overrides={**base, "run.mode": "mc"}).mode is RunMode.MC
    assert parse_config(overrides={**base, "run.mode": "oracle"}).mode is RunMode.ORACLE
    with pytest.raises(ValidationError):
        parse_config(overrides={**base, "run.mode": "analytic"})


def test_mode_mapping():
    assert RunMode.MC.analytic_modes == [] and RunMode.MC.simulate
    assert RunMode.BOTH.analytic_modes == [AnalyticMode.EXACT] and RunMode.BOTH.simulate
    assert AnalyticMode.DOMINANT in RunMode.HIGH_SNR.analytic_modes
    assert not RunMode.ORACLE.simulate


def test_unknown_preset():
    with pytest.raises(ValueError):
        preset_settings("fig9")
