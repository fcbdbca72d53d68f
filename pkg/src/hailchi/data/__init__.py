"""Bundled reference data.

``laurel_storm_path`` points at the hail storm of January 20, 2010 near
Laurel, Mississippi: 46 NEXRAD hail events with severe probabilities,
used as the regression fixture throughout the test suite.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

__all__ = ["laurel_storm_path"]


def laurel_storm_path() -> Path:
    return Path(str(resources.files(__package__).joinpath("laurel_ms_20100120.csv")))
