"""Command-line pipeline: simulate, cluster, fit, report.

Exit codes: 0 success, 2 usage error, 3 data error (unreadable or empty
inputs, missing cluster/report files, web-service failures), 4 numeric
failure (optimizer or quadrature non-convergence).

``--input`` accepts either a CSV path or ``swdi:START:END`` (ISO dates),
which fetches the hail CSV for that range from the SWDI web service at
``--swdi-base`` before parsing.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

from . import plots
from .cluster import (DEFAULT_JUMP_THRESHOLD, cut_dendrogram, event_features,
                      single_linkage)
from .fit import (FitConvergenceError, RadialMetric, fit_binormal, fit_chi,
                  fit_lognormal, fit_lognormal_euclidean, goodness_of_fit,
                  radial_series)
from .ingest import (DEFAULT_SWDI_BASE, CsvFormatError, Dataset, SwdiError,
                     fetch_swdi, parse_csv, write_csv)
from .linalg import DegenerateCovariance
from .report import (StormReport, atomic_write_text, format_summary_table,
                     report_from_json, report_to_json, summarize_binormal,
                     summarize_gof, summary_csv)
from .storm import QuadratureError, Velocity2, sample_events

__all__ = ["RunConfig", "cmd_cluster", "cmd_fit", "cmd_simulate", "cmd_report", "main"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

ALL_FITS = ("chi", "lognormal", "euclidean")


class DataError(RuntimeError):
    """Input files or previous pipeline outputs are missing or unusable."""


@dataclass
class RunConfig:
    """Everything a command needs; built from CLI flags."""

    input_path: str | None = None
    out_dir: Path = Path(".")
    time_scale: float = 0.0
    jump_threshold: float = DEFAULT_JUMP_THRESHOLD
    metric: RadialMetric = RadialMetric.COVARIANCE
    fits: tuple[str, ...] = ALL_FITS
    single_storm: bool = False
    contour_levels: tuple[float, ...] = plots.DEFAULT_CONTOUR_LEVELS
    count: int = 1000
    velocity: Velocity2 = field(default_factory=lambda: Velocity2(0.0, 0.0))
    seed: int = 0
    date_hint: date | None = None
    swdi_base: str = DEFAULT_SWDI_BASE

    def __post_init__(self) -> None:
        if self.time_scale < 0.0:
            raise ValueError(f"time-scale must be >= 0, got {self.time_scale}")
        if self.jump_threshold <= 1.0:
            raise ValueError(f"jump-threshold must be > 1, got {self.jump_threshold}")
        unknown = set(self.fits) - set(ALL_FITS)
        if unknown:
            raise ValueError(f"unknown fits: {', '.join(sorted(unknown))}")
        self.out_dir = Path(self.out_dir)


def _load_input(config: RunConfig) -> Dataset:
    if config.input_path is None:
        raise DataError("no --input given")
    spec = config.input_path
    if spec.startswith("swdi:"):
        try:
            _, start_s, end_s = spec.split(":", 2)
            start, end = date.fromisoformat(start_s), date.fromisoformat(end_s)
        except ValueError as exc:
            raise DataError(f"bad swdi input spec {spec!r}: expected swdi:START:END") from exc
        text = fetch_swdi(start, end, config.swdi_base)
        return parse_csv(text, date_hint=config.date_hint, name=spec)
    path = Path(spec)
    try:
        with path.open(newline="") as handle:
            return parse_csv(handle, date_hint=config.date_hint, name=str(path))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc


def _assignments(config: RunConfig, dataset: Dataset) -> list[int]:
    if config.single_storm:
        return [0] * len(dataset.events)
    clusters_path = config.out_dir / "clusters.json"
    if not clusters_path.exists():
        raise DataError(f"{clusters_path} not found; run `hailchi cluster` first "
                        "or pass --single-storm")
    raw = json.loads(clusters_path.read_text())
    if len(raw) != len(dataset.events):
        raise DataError(f"{clusters_path} labels {len(raw)} events but the input has "
                        f"{len(dataset.events)}")
    return [int(raw[str(i)]) for i in range(len(dataset.events))]


def cmd_cluster(config: RunConfig) -> int:
    """Cluster events into storms; write clusters.json, print per-storm counts."""
    dataset = _load_input(config)
    features = event_features(dataset.events, time_scale=config.time_scale)
    dendrogram = single_linkage(features)
    cut = cut_dendrogram(dendrogram, jump_threshold=config.jump_threshold)
    config.out_dir.mkdir(parents=True, exist_ok=True)
    mapping = {str(i): label for i, label in enumerate(cut.assignments)}
    atomic_write_text(config.out_dir / "clusters.json", json.dumps(mapping, indent=2))
    counts: dict[int, int] = {}
    for label in cut.assignments:
        counts[label] = counts.get(label, 0) + 1
    print(f"{len(dataset.events)} events -> {cut.cluster_count} storm(s) "
          f"(jump ratio {cut.jump_ratio:.3f})")
    for label in sorted(counts):
        print(f"  storm {label}: {counts[label]} events")
    return EXIT_OK


def _fit_storm(config: RunConfig, storm_id: int, events) -> StormReport:
    bfit = fit_binormal(events)
    series = radial_series(events, bfit, config.metric)
    chi = fit_chi(series) if "chi" in config.fits else None
    lognormal = fit_lognormal(series) if "lognormal" in config.fits else None
    euclidean = fit_lognormal_euclidean(events, bfit) if "euclidean" in config.fits else None
    gof = None
    if chi is not None and lognormal is not None and len(series) >= 4:
        gof = goodness_of_fit(series, chi, lognormal)
    out = config.out_dir
    if chi is not None and lognormal is not None:
        plots.save_cdf_plot(out / f"cdf{storm_id}.svg", series, chi, lognormal)
    if gof is not None:
        plots.save_qq_plot(out / f"qq{storm_id}.svg", gof)
    plots.save_contour_plot(out / f"contours{storm_id}.svg", events, bfit,
                            levels=config.contour_levels)
    return StormReport(
        storm_id=storm_id,
        event_count=len(events),
        metric=str(config.metric.value),
        binormal=summarize_binormal(bfit),
        chi=chi,
        lognormal=lognormal,
        lognormal_euclidean=euclidean,
        gof=summarize_gof(gof) if gof is not None else None,
    )


def cmd_fit(config: RunConfig) -> int:
    """Fit every storm; write storm<k>.json plus SVG artifacts per storm."""
    dataset = _load_input(config)
    labels = _assignments(config, dataset)
    config.out_dir.mkdir(parents=True, exist_ok=True)
    storms: dict[int, list[int]] = {}
    for i, label in enumerate(labels):
        storms.setdefault(label, []).append(i)
    skipped: list[dict] = []
    fitted = 0
    for storm_id in sorted(storms):
        events = [dataset.events[i] for i in storms[storm_id]]
        try:
            report = _fit_storm(config, storm_id, events)
        except DegenerateCovariance as exc:
            skipped.append({"storm": storm_id, "events": len(events), "reason": str(exc)})
            print(f"storm {storm_id}: skipped ({len(events)} events): {exc}")
            continue
        atomic_write_text(config.out_dir / f"storm{storm_id}.json", report_to_json(report))
        fitted += 1
        line = f"storm {storm_id}: {report.event_count} events"
        if report.chi is not None:
            line += f", lambda={report.chi.lambda_hat:.4f}, S_F={report.chi.sse:.4f}"
        if report.lognormal is not None:
            line += (f", mu={report.lognormal.mu_hat:.4f}, sigma={report.lognormal.sigma_hat:.4f}"
                     f", S_G_d={report.lognormal.sse:.4f}")
        print(line)
    run_note = {"storms_fitted": fitted, "metric": str(config.metric.value),
                "skipped": skipped}
    atomic_write_text(config.out_dir / "fit_run.json", json.dumps(run_note, indent=2))
    return EXIT_OK


def cmd_simulate(config: RunConfig) -> int:
    """Sample synthetic events from the traveling-storm model; write events.csv."""
    events = sample_events(config.count, config.velocity, config.seed)
    dataset = Dataset(events=events, source=f"simulate(v=({config.velocity.v1},"
                                            f"{config.velocity.v2}), seed={config.seed})")
    config.out_dir.mkdir(parents=True, exist_ok=True)
    path = config.out_dir / "events.csv"
    atomic_write_text(path, write_csv(dataset))
    print(f"wrote {len(events)} events to {path}")
    return EXIT_OK


def cmd_report(config: RunConfig) -> int:
    """Summarize all storm<k>.json files as an aligned table; write summary.csv."""
    paths = sorted(config.out_dir.glob("storm*.json"),
                   key=lambda p: int(p.stem.removeprefix("storm")))
    if not paths:
        raise DataError(f"no storm reports found in {config.out_dir}")
    reports = [report_from_json(p.read_text()) for p in paths]
    print(format_summary_table(reports))
    atomic_write_text(config.out_dir / "summary.csv", summary_csv(reports))
    return EXIT_OK


def _velocity(text: str) -> Velocity2:
    try:
        v1_s, v2_s = text.split(",")
        return Velocity2(float(v1_s), float(v2_s))
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"expected vx,vy — got {text!r}") from exc


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _levels(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad levels {text!r}") from exc
    if not values or any(v <= 0 for v in values):
        raise argparse.ArgumentTypeError("levels must be positive")
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hailchi",
                                     description="Hail-storm clustering, fitting, and reporting")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, needs_input: bool) -> None:
        if needs_input:
            p.add_argument("--input", required=True,
                           help="event CSV path, or swdi:START:END to fetch from SWDI")
            p.add_argument("--date", type=date.fromisoformat, default=None,
                           help="calendar date for files with bare HH:MM:SS times")
            p.add_argument("--swdi-base", default=DEFAULT_SWDI_BASE,
                           help="SWDI web-service base URL")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")

    p_cluster = sub.add_parser("cluster", help="group events into storms")
    common(p_cluster, needs_input=True)
    p_cluster.add_argument("--time-scale", type=float, default=0.0,
                           help="weight of the time axis in the clustering metric")
    p_cluster.add_argument("--jump-threshold", type=float, default=DEFAULT_JUMP_THRESHOLD,
                           help="dendrogram cut ratio (> 1)")

    p_fit = sub.add_parser("fit", help="fit each storm and write reports and figures")
    common(p_fit, needs_input=True)
    p_fit.add_argument("--single-storm", action="store_true",
                       help="treat the whole input as one storm (no clusters.json needed)")
    p_fit.add_argument("--metric", choices=[m.value for m in RadialMetric],
                       default=RadialMetric.COVARIANCE.value,
                       help="radial distance used for the fits")
    p_fit.add_argument("--fits", type=lambda s: tuple(s.split(",")), default=ALL_FITS,
                       help="comma-separated subset of chi,lognormal,euclidean")
    p_fit.add_argument("--contour-levels", type=_levels,
                       default=plots.DEFAULT_CONTOUR_LEVELS,
                       help="comma-separated ellipse levels for the contour figure")

    p_sim = sub.add_parser("simulate", help="draw synthetic events from the storm model")
    common(p_sim, needs_input=False)
    p_sim.add_argument("--count", type=_positive_int, required=True)
    p_sim.add_argument("--velocity", type=_velocity, default=Velocity2(0.0, 0.0),
                       help="storm velocity as vx,vy")
    p_sim.add_argument("--seed", type=int, default=0)

    p_report = sub.add_parser("report", help="tabulate fitted storms")
    common(p_report, needs_input=False)
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    kwargs = {"out_dir": args.out}
    for name, attr in (("input", "input_path"), ("time_scale", "time_scale"),
                       ("jump_threshold", "jump_threshold"), ("single_storm", "single_storm"),
                       ("fits", "fits"), ("contour_levels", "contour_levels"),
                       ("count", "count"), ("velocity", "velocity"), ("seed", "seed"),
                       ("date", "date_hint"), ("swdi_base", "swdi_base")):
        if getattr(args, name, None) is not None:
            kwargs[attr] = getattr(args, name)
    if hasattr(args, "metric"):
        kwargs["metric"] = RadialMetric(args.metric)
    return RunConfig(**kwargs)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
    except ValueError as exc:
        parser.error(str(exc))
    commands = {"cluster": cmd_cluster, "fit": cmd_fit,
                "simulate": cmd_simulate, "report": cmd_report}
    try:
        return commands[args.command](config)
    except (DataError, CsvFormatError, SwdiError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (FitConvergenceError, QuadratureError, ValueError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
