import json

import pandas as pd
import pytest

from src.cli import main, parse_args
from src.sgf_noma.export_csv import CSV_FIELDS

SMALL = ["--set", "run.schemes=CS,RS", "--set", "sweep.snr_db=0,10", "--trials", "2000",
         "--seed", "5", "--no-progress", "--name", "small"]


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("SGF_WORKERS", "SGF_SEED", "SGF_TRIALS", "SGF_OUT"):
        monkeypatch.delenv(name, raising=False)


def test_presets_listing(capsys):
    assert main(["presets"]) == 0
    out = capsys.readouterr().out
    assert "fig1a" in out and "fig7" in out
    assert main(["presets", "fig9"]) == 2


def test_flags_parse():
    args = parse_args(["run", "--preset", "fig4a", "--set", "run.trials=10", "--set", "run.seed=1"])
    assert args.preset == "fig4a" and args.overrides == ["run.trials=10", "run.seed=1"]


def test_small_run_writes_csv_and_manifest(tmp_path):
    assert main(["run", "--out", str(tmp_path)] + SMALL) == 0
    csv_path = tmp_path / "small.csv"
    assert csv_path.read_text(encoding="utf-8").splitlines()[0] == ",".join(CSV_FIELDS)
    df = pd.read_csv(csv_path)
    assert len(df) == 4  # two schemes x two SNR points
    assert set(df["mode"]) == {"mc"} and set(df["metric"]) == {"outage"}
    assert (df["trials"] == 2000).all()
    manifest = json.loads((tmp_path / "small_manifest.json").read_text(encoding="utf-8"))
    assert manifest["status"] == "ok" and manifest["seed"] == 5
    assert manifest["outputs"] == ["small.csv", "small_wide.csv"]


def test_rerun_is_byte_identical(tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--out", str(first)] + SMALL) == 0
    assert main(["run", "--out", str(second), "--workers", "2"] + SMALL) == 0
    assert (first / "small.csv").read_bytes() == (second / "small.csv").read_bytes()


def test_manifest_replay(tmp_path):
    first, replay = tmp_path / "a", tmp_path / "replay"
    assert main(["run", "--out", str(first)] + SMALL) == 0
    argv = ["run", "--manifest", str(first / "small_manifest.json"), "--out", str(replay),
            "--name", "small", "--no-progress"]
    assert main(argv) == 0
    assert (first / "small.csv").read_bytes() == (replay / "small.csv").read_bytes()


def test_mode_both_adds_analytic_rows(tmp_path):
    assert main(["run", "--out", str(tmp_path), "--mode", "both"] + SMALL) == 0
    df = pd.read_csv(tmp_path / "small.csv")
    assert set(df["mode"]) == {"mc", "analytic"}
    wide = pd.read_csv(tmp_path / "small_wide.csv")
    assert {"mc", "mc_ci_low", "mc_ci_high", "analytic"} <= set(wide.columns)
    assert len(wide) == 4
    assert ((wide["analytic"] - wide["mc"]).abs() < 0.05).all()


@pytest.mark.parametrize("extra", [
    ["--set", "run.schemes=XX", "--set", "sweep.snr_db=0"],
    ["--set", "run.schemes=CS", "--set", "sweep.snr_db=0", "--set", "scenario.colour=red"],
    ["--set", "run.schemes=CS"],
])
def test_bad_config_exits_2(tmp_path, extra, capsys):
    assert main(["run", "--out", str(tmp_path), "--no-progress"] + extra) == 2
    assert "[error]" in capsys.readouterr().err
