import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hailchi.data import laurel_storm_path
from hailchi.fit import RadialMetric, fit_binormal, radial_series
from hailchi.ingest import parse_csv


@pytest.fixture(scope="session")
def laurel_dataset():
    with open(laurel_storm_path(), newline="") as handle:
        return parse_csv(handle, name="laurel")


@pytest.fixture(scope="session")
def laurel_fit(laurel_dataset):
    return fit_binormal(laurel_dataset.events)


@pytest.fixture(scope="session")
def laurel_series(laurel_dataset, laurel_fit):
    """Radial series under the covariance metric (the report default)."""
    return radial_series(laurel_dataset.events, laurel_fit, RadialMetric.COVARIANCE)
