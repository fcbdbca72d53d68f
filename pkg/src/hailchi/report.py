"""Per-storm result records, JSON persistence, and the summary table.

Reports hold plain floats/ints/tuples only, so a report written to JSON and
read back compares equal field for field (Python's JSON writer emits
shortest round-trip decimals).
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .fit import BinormalFit, ChiFit, GoFReport, LogNormalFit

__all__ = [
    "BinormalSummary",
    "GoFSummary",
    "StormReport",
    "summarize_binormal",
    "summarize_gof",
    "report_to_json",
    "report_from_json",
    "format_penalty",
    "format_summary_table",
    "summary_csv",
    "atomic_write_text",
    "atomic_write_bytes",
]


@dataclass(frozen=True)
class BinormalSummary:
    """JSON-friendly view of a BinormalFit."""

    mean: tuple[float, float]
    cov: tuple[tuple[float, float], tuple[float, float]]
    semi_axes: tuple[float, float]
    axis_directions: tuple[tuple[float, float], tuple[float, float]]
    total_weight: float


@dataclass(frozen=True)
class GoFSummary:
    """JSON-friendly view of a GoFReport."""

    f_statistic: float
    p_value: float
    dof: tuple[int, int]
    residuals_chi: tuple[float, ...]
    residuals_lognormal: tuple[float, ...]
    qq_chi: tuple[tuple[float, float], ...]
    qq_lognormal: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class StormReport:
    """Everything cmd_fit learned about one storm.

    Fit fields are None when that fit was excluded from the run config.
    """

    storm_id: int
    event_count: int
    metric: str
    binormal: BinormalSummary
    chi: ChiFit | None
    lognormal: LogNormalFit | None
    lognormal_euclidean: LogNormalFit | None
    gof: GoFSummary | None


def summarize_binormal(fit: BinormalFit) -> BinormalSummary:
    mean = tuple(float(v) for v in fit.mean)
    cov = tuple(tuple(float(v) for v in row) for row in fit.cov.entries)
    axes = tuple(float(v) for v in fit.eigen.semi_axes)
    dirs = tuple(tuple(float(v) for v in row) for row in fit.eigen.rotation)
    return BinormalSummary(mean=mean, cov=cov, semi_axes=axes,
                           axis_directions=dirs, total_weight=float(fit.total_weight))


def summarize_gof(gof: GoFReport) -> GoFSummary:
    return GoFSummary(
        f_statistic=float(gof.f_statistic),
        p_value=float(gof.p_value),
        dof=tuple(int(v) for v in gof.dof),
        residuals_chi=tuple(float(v) for v in gof.residuals_chi),
        residuals_lognormal=tuple(float(v) for v in gof.residuals_lognormal),
        qq_chi=tuple((float(t), float(e)) for t, e in gof.qq_chi),
        qq_lognormal=tuple((float(t), float(e)) for t, e in gof.qq_lognormal),
    )


def report_to_json(report: StormReport) -> str:
    return json.dumps(asdict(report), indent=2)


def _pairs(items: Iterable[Sequence[float]]) -> tuple[tuple[float, float], ...]:
    return tuple((float(a), float(b)) for a, b in items)


def report_from_json(text: str) -> StormReport:
    raw = json.loads(text)
    gof = None
    if raw.get("gof") is not None:
        g = raw["gof"]
        gof = GoFSummary(
            f_statistic=g["f_statistic"],
            p_value=g["p_value"],
            dof=tuple(int(v) for v in g["dof"]),
            residuals_chi=tuple(float(v) for v in g["residuals_chi"]),
            residuals_lognormal=tuple(float(v) for v in g["residuals_lognormal"]),
            qq_chi=_pairs(g["qq_chi"]),
            qq_lognormal=_pairs(g["qq_lognormal"]),
        )
    b = raw["binormal"]
    binormal = BinormalSummary(
        mean=tuple(float(v) for v in b["mean"]),
        cov=tuple(tuple(float(v) for v in row) for row in b["cov"]),
        semi_axes=tuple(float(v) for v in b["semi_axes"]),
        axis_directions=tuple(tuple(float(v) for v in row) for row in b["axis_directions"]),
        total_weight=float(b["total_weight"]),
    )
    return StormReport(
        storm_id=int(raw["storm_id"]),
        event_count=int(raw["event_count"]),
        metric=str(raw["metric"]),
        binormal=binormal,
        chi=ChiFit(**raw["chi"]) if raw.get("chi") is not None else None,
        lognormal=(LogNormalFit(**raw["lognormal"])
                   if raw.get("lognormal") is not None else None),
        lognormal_euclidean=(LogNormalFit(**raw["lognormal_euclidean"])
                             if raw.get("lognormal_euclidean") is not None else None),
        gof=gof,
    )


def format_penalty(value: float | None) -> str:
    """Penalties take 3 decimals below 1 and 1 decimal above, as in the summary table."""
    if value is None:
        return "-"
    return f"{value:.3f}" if value < 1.0 else f"{value:.1f}"


def format_summary_table(reports: Sequence[StormReport]) -> str:
    """Aligned text table: storm id, event count, S_F, S_G, S^d_G."""
    header = ("storm", "events", "S_F", "S_G", "S_G_d")
    rows = [header]
    for r in reports:
        rows.append((str(r.storm_id), str(r.event_count),
                     format_penalty(r.chi.sse if r.chi else None),
                     format_penalty(r.lognormal_euclidean.sse if r.lognormal_euclidean else None),
                     format_penalty(r.lognormal.sse if r.lognormal else None)))
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    return "\n".join("  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in rows)


def summary_csv(reports: Sequence[StormReport]) -> str:
    """Machine-readable summary at full precision."""
    lines = ["storm,events,S_F,S_G,S_G_d"]
    for r in reports:
        cells = [str(r.storm_id), str(r.event_count)]
        for fit in (r.chi, r.lognormal_euclidean, r.lognormal):
            cells.append(repr(fit.sse) if fit is not None else "")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def atomic_write_text(path: Path, text: str) -> None:
    """Write via a temp file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def atomic_write_bytes(path: Path, payload: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise
