"""Command-line entry point.

Subcommands:
  run CONFIG        execute a scenario, write CSV series, summary, plot, manifest
  fit CSV           fit friction coefficients per sheath type from sample data
  hand describe     print the 21-joint table (ranges in degrees)
  validate CONFIG   check a configuration without running it

Exit codes are a stable contract: 0 success, 2 configuration error,
3 scenario error, 4 data error. Failures print a machine-readable JSON
error report to stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
import time
from pathlib import Path

from . import __version__
from .config import load_config, run_id
from .errors import (
    ConfigError,
    CsvSchemaError,
    DegenerateData,
    NonPositiveTension,
    ScenarioError,
    TendonSimError,
)
from .estimation import fit_mu, read_friction_samples, write_fit_report
from .hand import default_hand
from .scenarios import RunRecord, run_scenario, sweep_to_samples
from .svgplot import PlotSeries, line_plot

_EXIT_OK = 0
_EXIT_CONFIG = 2
_EXIT_SCENARIO = 3
_EXIT_DATA = 4


@dataclasses.dataclass(frozen=True)
class RunManifest:
    """Provenance sidecar for one run; the id is a pure function of config + seed."""

    run_id: str
    timestamp: str
    config_path: str
    seed: int
    kind: str
    outputs: tuple[str, ...]
    tool_version: str

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "timestamp": self.timestamp,
            "config_path": self.config_path,
            "seed": self.seed,
            "kind": self.kind,
            "outputs": list(self.outputs),
            "tool_version": self.tool_version,
        }


def _error_report(exc: Exception) -> None:
    report = {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(report, sort_keys=True), file=sys.stderr)


def _classify(exc: TendonSimError) -> int:
    if isinstance(exc, ConfigError):
        return _EXIT_CONFIG
    if isinstance(exc, (CsvSchemaError, DegenerateData, NonPositiveTension)):
        return _EXIT_DATA
    return _EXIT_SCENARIO


def cmd_run(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    record = run_scenario(cfg, jobs=args.jobs)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    series_path = out_dir / "series.csv"
    record.to_csv(series_path)
    record.write_summary(out_dir / "summary.json")
    plot_path = out_dir / "plot.svg"
    _write_plot(record, plot_path)

    manifest = RunManifest(
        run_id=run_id(cfg),
        timestamp=time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        config_path=str(Path(args.config).resolve()),
        seed=cfg.seed,
        kind=cfg.kind,
        outputs=("series.csv", "summary.json", "plot.svg"),
        tool_version=__version__,
    )
    with open(out_dir / "manifest.json", "w") as f:
        json.dump(manifest.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")

    if not args.quiet:
        print(f"run {manifest.run_id} ({cfg.kind}) -> {out_dir}")
        for key in sorted(record.summary):
            print(f"  {key}: {record.summary[key]}")
    return _EXIT_OK


_PLOT_POINT_BUDGET = 2000  # per series; long runs are strided deterministically


def _strided(record: RunRecord, name: str) -> tuple[float, ...]:
    values = record.column(name)
    stride = max(1, math.ceil(values.size / _PLOT_POINT_BUDGET))
    return tuple(values[::stride])


def _write_plot(record: RunRecord, path: Path) -> None:
    if record.kind == "friction_sweep":
        _plot_friction_sweep(record, path)
    elif record.kind == "fingertip_force":
        series = [
            PlotSeries(
                x=_strided(record, "t"),
                y=_strided(record, col),
                label=col[len("force_"):],
            )
            for col in record.columns
            if col.startswith("force_")
        ]
        line_plot(path, series, "Fingertip force", "time [s]", "force [N]")
    elif record.kind == "step_response":
        t = _strided(record, "t")
        series = [
            PlotSeries(x=t, y=_strided(record, "q_ref"), label="reference", dashed=True),
            PlotSeries(x=t, y=_strided(record, "q_meas"), label="measured"),
        ]
        line_plot(path, series, "Step response", "time [s]", "joint angle [rad]")
    elif record.kind == "sine_tracking":
        t = _strided(record, "t")
        series = [
            PlotSeries(x=t, y=_strided(record, "q_ref"), label="reference", dashed=True),
            PlotSeries(x=t, y=_strided(record, "q_meas_static"), label="static arm"),
            PlotSeries(x=t, y=_strided(record, "q_meas_moving"), label="moving arm"),
        ]
        line_plot(path, series, "Sinusoidal tracking", "time [s]", "joint angle [rad]")
    else:
        raise ScenarioError(f"no plot defined for kind {record.kind!r}")


def _plot_friction_sweep(record: RunRecord, path: Path) -> None:
    names = record.text_column("sheath_type")
    angles = record.column("wrap_angle_deg")
    diameters = record.column("disk_diameter_mm")
    mean = record.column("mean_tension_N")
    load = record.column("load_N")
    biggest = max(diameters)
    series = []
    for name in sorted(set(names)):
        pick = [
            i
            for i in range(len(names))
            if names[i] == name and diameters[i] == biggest
        ]
        pick.sort(key=lambda i: angles[i])
        series.append(
            PlotSeries(
                x=tuple(angles[i] for i in pick),
                y=tuple(mean[i] - load[i] for i in pick),
                label=name,
                markers=True,
            )
        )
        # exponential fit overlay, dashed
        fit = fit_mu(sweep_to_samples(record)[name])
        xs = tuple(angles[i] for i in pick)
        t0 = load[pick[0]]
        ys = tuple(t0 * math.expm1(fit.mu * math.radians(x)) for x in xs)
        series.append(PlotSeries(x=xs, y=ys, label=f"{name} fit", dashed=True))
    line_plot(path, series, "Friction vs wrap angle", "wrap angle [deg]", "friction [N]")


def cmd_fit(args: argparse.Namespace) -> int:
    groups = read_friction_samples(args.csv)
    fits = {}
    counts = {}
    for sheath_type in sorted(groups):
        fits[sheath_type] = fit_mu(groups[sheath_type], space=args.space)
        counts[sheath_type] = len(groups[sheath_type])
    if not args.quiet:
        print(f"{'sheath_type':<28} {'mu':>10} {'r_squared':>10} {'se_mu':>10} {'n':>4}")
        for sheath_type in sorted(fits):
            fit = fits[sheath_type]
            print(
                f"{sheath_type:<28} {fit.mu:>10.6f} {fit.r_squared:>10.6f} "
                f"{fit.standard_error_mu:>10.2e} {counts[sheath_type]:>4}"
            )
    out = args.out or (str(Path(args.csv).with_suffix("")) + ".fit.csv")
    write_fit_report(out, fits, counts)
    if not args.quiet:
        print(f"fit report -> {out}")
    return _EXIT_OK


def cmd_hand_describe(args: argparse.Namespace) -> int:
    hand = default_hand()
    for joint in hand.joints:
        print(
            f"{joint.finger.value.capitalize()} {joint.joint_name.value} "
            f"{joint.max_angle_deg:g} {joint.actuation.value}"
        )
    return _EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    if not args.quiet:
        print(f"ok: {args.config} ({cfg.kind}, run id {run_id(cfg)})")
    return _EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tendonsim",
        description="Simulator and analysis toolkit for remote tendon-sheath actuation",
    )
    parser.add_argument("--version", action="version", version=f"tendonsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a scenario config")
    p_run.add_argument("config", help="scenario YAML file")
    p_run.add_argument("--out", default="runs/latest", help="output directory")
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.add_argument("--jobs", type=int, default=1, help="parallel workers for sweep grids")
    p_run.add_argument("--quiet", action="store_true")
    p_run.set_defaults(func=cmd_run)

    p_fit = sub.add_parser("fit", help="fit friction coefficients from a sample CSV")
    p_fit.add_argument("csv", help="friction sample CSV")
    p_fit.add_argument("--out", default=None, help="fit report path (default: <csv>.fit.csv)")
    p_fit.add_argument("--space", choices=("log", "tension"), default="log")
    p_fit.add_argument("--quiet", action="store_true")
    p_fit.set_defaults(func=cmd_fit)

    p_hand = sub.add_parser("hand", help="hand model queries")
    hand_sub = p_hand.add_subparsers(dest="hand_command", required=True)
    p_desc = hand_sub.add_parser("describe", help="print the 21-joint table")
    p_desc.set_defaults(func=cmd_hand_describe)

    p_val = sub.add_parser("validate", help="validate a scenario config without running")
    p_val.add_argument("config", help="scenario YAML file")
    p_val.add_argument("--quiet", action="store_true")
    p_val.set_defaults(func=cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TendonSimError as exc:
        _error_report(exc)
        return _classify(exc)


if __name__ == "__main__":
    sys.exit(main())
