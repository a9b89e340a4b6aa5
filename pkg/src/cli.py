# src/cli.py
from __future__ import annotations
import argparse, logging, os, sys, time, traceback
from pathlib import Path
from typing import Dict, List, Optional

from dotenv import load_dotenv
load_dotenv()

from src.sgf_noma.config import RunConfig, parse_config, parse_overrides, parse_settings
from src.sgf_noma.engine import Engine
from src.sgf_noma.export_csv import CSVExporter, read_manifest, write_manifest
from src.sgf_noma.presets import PRESETS
from src.sgf_noma.validators import clamp_events, reset_clamp_events

# flag -> settings key
FLAG_KEYS = {
    "preset": "run.preset",
    "mode": "run.mode",
    "trials": "run.trials",
    "seed": "run.seed",
    "workers": "run.workers",
    "out": "run.out",
}


def parse_args(argv=None):
    p = argparse.ArgumentParser(description="Semi-grant-free NOMA outage simulator")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run a figure preset or a custom sweep")
    run.add_argument("--config", help="key = value config file")
    run.add_argument("--preset", help=f"{' | '.join(sorted(PRESETS))} | custom")
    run.add_argument("--mode", choices=["mc", "analytic", "both", "high-snr", "oracle"])
    run.add_argument("--trials", help="Monte Carlo trials per sweep point")
    run.add_argument("--seed", help="Master seed")
    run.add_argument("--workers", help="Worker processes for Monte Carlo chunks")
    run.add_argument("--out", help="Output folder (CSV & manifest go here)")
    run.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                     help="Override any config key (repeatable)")
    run.add_argument("--manifest", help="Replay the settings stored in a manifest")
    run.add_argument("--name", help="Base name of the output files (default: preset name)")
    run.add_argument("--no-progress", action="store_true", help="Hide the progress bar")
    run.add_argument("-v", "--verbose", action="store_true", help="Library logs at INFO")

    pre = sub.add_parser("presets", help="List figure presets and their settings")
    pre.add_argument("name", nargs="?", help="Show a single preset")
    return p.parse_args(argv)


def flag_overrides(args) -> Dict[str, str]:
    out = parse_overrides(args.overrides)
    for flag, key in FLAG_KEYS.items():
        value = getattr(args, flag, None)
        if value is not None:
            out[key] = str(value)
    return out


def load_run_config(args) -> RunConfig:
    if args.manifest:
        settings = dict(read_manifest(args.manifest)["settings"])
        if args.out:
            settings["run.out"] = args.out
        return parse_settings(settings)
    return parse_config(args.config, flag_overrides(args), os.environ)


def execute(config: RunConfig, name: Optional[str] = None, progress: bool = True) -> int:
    name = name or config.preset
    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    reset_clamp_events()

    points = config.plan.points()
    print(f"[info] {name}: {len(points)} point(s), schemes {','.join(s.value for s in config.plan.schemes)}, "
          f"mode {config.mode.value}, hash {config.hash}")

    started = time.perf_counter()
    engine = Engine(config.plan, workers=config.workers, orders=config.orders, progress=progress)
    results = engine.run_sweep(simulate=config.mode.simulate, analytic_modes=config.mode.analytic_modes,
                               on_error="record")
    wall = time.perf_counter() - started

    exporter = CSVExporter(preset=config.preset)
    for res in results:
        try:
            exporter.add_point(res)
        except Exception as e:
            # keep going even if a single point fails to export
            print(f"[warn] export failed on point {res.point_index}: {e}", file=sys.stderr)

    outputs: List[str] = []
    csv_path = exporter.write(out_dir / f"{name}.csv")
    outputs.append(csv_path.name)
    print(f"[info] wrote results -> {csv_path}")
    try:
        wide_path = exporter.write_wide(out_dir / f"{name}_wide.csv")
        outputs.append(wide_path.name)
        print(f"[info] wrote wide table -> {wide_path}")
    except Exception as e:
        print(f"[warn] failed to write wide table: {e}", file=sys.stderr)

    failures = [
        {"point_index": f.point_index,
         "point": {k: v for k, v in f.point.model_dump().items() if v is not None},
         "error": str(f.cause)}
        for f in engine.failures
    ]
    for f in engine.failures:
        print(f"[error] {f}", file=sys.stderr)

    events = clamp_events()
    if events:
        print(f"[warn] probabilities clamped into [0, 1]: {events}", file=sys.stderr)

    manifest = write_manifest(
        out_dir / f"{name}_manifest.json",
        settings=config.settings, config_hash=config.hash, seed=config.plan.master_seed,
        wall_time_s=wall, outputs=outputs, failures=failures, clamp_events=events, points=len(points),
    )
    print(f"[info] wrote manifest -> {manifest} ({wall:.1f}s)")
    return 1 if failures else 0


def show_presets(name: Optional[str] = None) -> int:
    names = [name] if name else sorted(PRESETS)
    for n in names:
        if n not in PRESETS:
            print(f"[error] unknown preset: {n}", file=sys.stderr)
            return 2
        print(n)
        for key, value in PRESETS[n].items():
            print(f"  {key} = {value}")
    return 0


def main(argv=None):
    args = parse_args(argv)
    if args.command == "presets":
        return show_presets(args.name)

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        config = load_run_config(args)
    except (ValueError, OSError) as e:
        print(f"[error] bad configuration: {e}", file=sys.stderr)
        return 2

    try:
        return execute(config, name=args.name, progress=not args.no_progress)
    except OSError as e:
        print(f"[error] failed writing outputs: {e}", file=sys.stderr)
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
