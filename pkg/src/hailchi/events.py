"""The basic data record: one radar-detected hail event."""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

__all__ = ["HailEvent"]


@dataclass(frozen=True)
class HailEvent:
    """A single hail detection: UTC time, location in degrees, severe probability.

    The severe probability acts as the event's weight and must lie in (0, 1].
    """

    time: datetime
    lon: float
    lat: float
    prob: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lon) and math.isfinite(self.lat)):
            raise ValueError(f"HailEvent: coordinates must be finite, got ({self.lon}, {self.lat})")
        if not 0.0 < self.prob <= 1.0:
            raise ValueError(f"HailEvent: prob must be in (0,1], got {self.prob}")
        if self.time.tzinfo is None:
            object.__setattr__(self, "time", self.time.replace(tzinfo=timezone.utc))

    @property
    def xy(self) -> np.ndarray:
        return np.array([self.lon, self.lat])
