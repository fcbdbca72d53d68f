"""Forward model of a traveling storm.

A storm deposits damage with a unit binormal footprint around its center;
the center moves at constant velocity v while the intensity follows a
standard normal envelope in time. Marginalizing over time gives a binormal
total-damage density whose covariance is I + v v^T, i.e.

    sigma1 = sqrt(1 + v1^2),  sigma2 = sqrt(1 + v2^2),
    rho = v1 v2 / (sigma1 sigma2).

Both the closed form and a quadrature evaluation of the time integral are
provided; they cross-validate each other. A Monte Carlo sampler draws
synthetic events from the generative model (time first, then location).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone

import numpy as np
from scipy import integrate

from .events import HailEvent
from .linalg import SymPosDefMatrix

__all__ = [
    "Velocity2",
    "TravelingStormParams",
    "QuadratureError",
    "instantaneous_damage",
    "intensity",
    "covariance_from_velocity",
    "total_damage_closed",
    "total_damage_quadrature",
    "sample_events",
]

_TWO_PI = 2.0 * math.pi

# The time integrand decays like exp(-t^2/2); beyond |t| = 12 it is below
# 1e-30 of its peak, so truncation there is lossless at double precision.
_T_SPAN = 12.0

_SAMPLE_EPOCH = datetime(2010, 1, 20, 12, 0, 0, tzinfo=timezone.utc)


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


@dataclass(frozen=True)
class Velocity2:
    """Constant storm velocity, east and north components."""

    v1: float
    v2: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.v1) and math.isfinite(self.v2)):
            raise ValueError(f"Velocity2: components must be finite, got ({self.v1}, {self.v2})")

    @property
    def speed_sq(self) -> float:
        return self.v1 * self.v1 + self.v2 * self.v2


@dataclass(frozen=True)
class TravelingStormParams:
    """Standard-form binormal parameters of the time-marginal damage density."""

    sigma1: float
    sigma2: float
    rho: float
    covariance: SymPosDefMatrix = field(repr=False)


def instantaneous_damage(x, c) -> float:
    """Unit binormal damage footprint centered at c, evaluated at x."""
    dx = float(x[0]) - float(c[0])
    dy = float(x[1]) - float(c[1])
    return math.exp(-0.5 * (dx * dx + dy * dy)) / _TWO_PI


def intensity(t: float) -> float:
    """Storm intensity envelope: standard normal density in rescaled time."""
    return math.exp(-0.5 * t * t) / math.sqrt(_TWO_PI)


def covariance_from_velocity(v: Velocity2) -> TravelingStormParams:
    """Binormal parameters of the total damage for a storm moving at v.

    The covariance is I + v v^T, so det = 1 + |v|^2.
    """
    sigma1 = math.sqrt(1.0 + v.v1 * v.v1)
    sigma2 = math.sqrt(1.0 + v.v2 * v.v2)
    rho = v.v1 * v.v2 / (sigma1 * sigma2)
    cov = SymPosDefMatrix(np.array([
        [sigma1 * sigma1, rho * sigma1 * sigma2],
        [rho * sigma1 * sigma2, sigma2 * sigma2],
    ]))
    return TravelingStormParams(sigma1=sigma1, sigma2=sigma2, rho=rho, covariance=cov)


def total_damage_closed(x, v: Velocity2) -> float:
    """Closed form of the time-marginal damage density at x.

    exp(-((|x|^2 - <v,x>^2/(1+|v|^2)) / 2)) / (2 pi sqrt(1+|v|^2)).
    """
    alpha_sq = 1.0 + v.speed_sq
    x1, x2 = float(x[0]), float(x[1])
    norm_sq = x1 * x1 + x2 * x2
    dot = v.v1 * x1 + v.v2 * x2
    return math.exp(-0.5 * (norm_sq - dot * dot / alpha_sq)) / (_TWO_PI * math.sqrt(alpha_sq))


def total_damage_quadrature(x, v: Velocity2) -> float:
    """Time-marginal damage density by adaptive quadrature of I(t) D_tv(x) dt.

    Integrates over t in [-12, 12] to absolute tolerance 1e-12 and raises
    QuadratureError if the integrator cannot certify that accuracy.
    """
    x1, x2 = float(x[0]), float(x[1])

    def integrand(t: float) -> float:
        return intensity(t) * instantaneous_damage((x1, x2), (t * v.v1, t * v.v2))

    value, abserr = integrate.quad(integrand, -_T_SPAN, _T_SPAN,
                                   epsabs=1e-12, epsrel=1e-12, limit=200)
    if abserr > 1e-10:
        raise QuadratureError(
            f"time integral at x=({x1}, {x2}) did not converge (abserr={abserr:.2e})")
    return value


def sample_events(count: int, v: Velocity2, seed: int) -> list[HailEvent]:
    """Draw synthetic hail events from the traveling-storm model.

    Each event takes a time t ~ N(0,1) and a location t*v + z with
    z ~ N(0, I); severe probability is fixed at 1. Reproducible for a
    given seed. Timestamps map model time to hours around a fixed epoch.
    """
    if count < 1:
        raise ValueError(f"sample_events: count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    t = rng.standard_normal(count)
    z = rng.standard_normal((count, 2))
    lon = t * v.v1 + z[:, 0]
    lat = t * v.v2 + z[:, 1]
    return [
        HailEvent(time=_SAMPLE_EPOCH + timedelta(seconds=round(float(ti) * 3600.0)),
                  lon=float(lon[i]), lat=float(lat[i]), prob=1.0)
        for i, ti in enumerate(t)
    ]
