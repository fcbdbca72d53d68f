"""SVG figure artifacts for the report pipeline.

Three figures per storm: the empirical radial CDF with both fitted curves,
a Q-Q plot of both fits, and the event scatter with covariance contour
ellipses. Rendering is deterministic: the SVG hash salt is pinned and the
creation-date metadata suppressed, so identical inputs give byte-identical
files.
"""

from __future__ import annotations

import io
import math
from pathlib import Path
from typing import Sequence

import matplotlib
import numpy as np

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "hailchi"

from matplotlib.figure import Figure  # noqa: E402  (backend must be set first)

from .events import HailEvent
from .fit import BinormalFit, ChiFit, GoFReport, LogNormalFit, RadialSeries, ellipse_points
from .report import GoFSummary, atomic_write_bytes
from .special import chi_family_cdf, lognormal_cdf

__all__ = [
    "DEFAULT_CONTOUR_LEVELS",
    "save_cdf_plot",
    "save_qq_plot",
    "save_contour_plot",
]

DEFAULT_CONTOUR_LEVELS = (0.5, 1.0, 1.5, 2.0)


def _save(fig: Figure, path: Path) -> None:
    buffer = io.BytesIO()
    fig.savefig(buffer, format="svg", metadata={"Date": None})
    atomic_write_bytes(Path(path), buffer.getvalue())


def save_cdf_plot(path: Path, series: RadialSeries, chi: ChiFit, lognormal: LogNormalFit) -> None:
    """Empirical step CDF with the fitted chi-family and log-normal curves."""
    fig = Figure(figsize=(6.4, 4.0))
    ax = fig.add_subplot(111)
    d = series.distances
    cum = series.cum_weights
    ax.step(np.concatenate([[0.0], d]), np.concatenate([[0.0], cum]),
            where="post", color="0.3", lw=1.2, label="empirical")
    grid = np.linspace(1e-9, 1.05 * float(d[-1]), 400)
    ax.plot(grid, [chi_family_cdf(r, chi.lambda_hat) for r in grid],
            color="tab:red", lw=1.4, label=f"chi family ($\\lambda$={chi.lambda_hat:.3f})")
    ax.plot(grid, [lognormal_cdf(r, lognormal.mu_hat, lognormal.sigma_hat) for r in grid],
            color="tab:blue", lw=1.4, ls="--",
            label=f"log-normal ($\\mu$={lognormal.mu_hat:.3f}, $\\sigma$={lognormal.sigma_hat:.3f})")
    ax.set_xlabel("radial distance")
    ax.set_ylabel("cumulative weight")
    ax.set_ylim(0.0, 1.05)
    ax.legend(loc="lower right", fontsize=8)
    _save(fig, path)


def save_qq_plot(path: Path, gof: GoFReport | GoFSummary) -> None:
    """Fitted vs empirical quantiles for both fits, with the diagonal."""
    fig = Figure(figsize=(4.8, 4.8))
    ax = fig.add_subplot(111)
    qq_chi = np.array(gof.qq_chi)
    qq_ln = np.array(gof.qq_lognormal)
    top = 1.05 * max(float(qq_chi.max()), float(qq_ln.max()))
    ax.plot([0.0, top], [0.0, top], color="0.6", lw=0.8)
    ax.plot(qq_chi[:, 0], qq_chi[:, 1], "<", color="tab:red", ms=4, label="chi family")
    ax.plot(qq_ln[:, 0], qq_ln[:, 1], "o", color="tab:blue", ms=3.2, label="log-normal")
    ax.set_xlabel("fitted quantile")
    ax.set_ylabel("empirical quantile")
    ax.legend(loc="lower right", fontsize=8)
    _save(fig, path)


def save_contour_plot(path: Path, events: Sequence[HailEvent], fit: BinormalFit,
                      levels: Sequence[float] = DEFAULT_CONTOUR_LEVELS) -> None:
    """Event scatter (marker area proportional to severe probability) with level ellipses."""
    fig = Figure(figsize=(6.4, 4.8))
    ax = fig.add_subplot(111)
    lon = [e.lon for e in events]
    lat = [e.lat for e in events]
    sizes = [80.0 * e.prob for e in events]
    ax.scatter(lon, lat, s=sizes, color="tab:blue", alpha=0.6, edgecolors="none",
               label="hail events")
    for level in levels:
        ring = ellipse_points(fit, level, count=240)
        ax.plot(ring[:, 0], ring[:, 1], color="tab:red", lw=1.0)
    ax.plot([fit.mean[0]], [fit.mean[1]], "+", color="black", ms=9, mew=1.5)
    ax.set_xlabel("longitude")
    ax.set_ylabel("latitude")
    ax.set_aspect("equal", adjustable="datalim")
    ax.legend(loc="best", fontsize=8)
    _save(fig, path)
