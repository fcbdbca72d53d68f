"""Hail-event CSV ingestion and the Severe Weather Data Inventory client.

The CSV dialect matches SWDI hail exports: a header with ZTIME (or TIME),
LON, LAT, and PROB (or SEVPROB) columns, case-insensitive, comma separated.
Severe probabilities above 1 are read as integer percents and divided by
100. Rows that fail to parse are collected with a machine-readable reason
instead of aborting the load; only a malformed header or a file with zero
parseable rows is fatal.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from datetime import date, datetime, time as dtime, timezone
from typing import Iterable

import requests

from .events import HailEvent

__all__ = [
    "RawRecord",
    "Dataset",
    "CsvFormatError",
    "SwdiError",
    "SwdiTransportError",
    "SwdiStatusError",
    "SwdiEmptyBodyError",
    "DEFAULT_SWDI_BASE",
    "parse_csv",
    "write_csv",
    "fetch_swdi",
]

# NCDC web service root for the Severe Weather Data Inventory.
DEFAULT_SWDI_BASE = "http://www.ncdc.noaa.gov/swdiws"

_TIME_COLUMNS = ("ZTIME", "TIME")
_PROB_COLUMNS = ("PROB", "SEVPROB")


class CsvFormatError(ValueError):
    """Header is missing a required column, or no row parsed."""


class SwdiError(RuntimeError):
    """Base class for SWDI web-service failures."""


class SwdiTransportError(SwdiError):
    """Network-level failure (DNS, connect, timeout)."""


class SwdiStatusError(SwdiError):
    """Non-success HTTP status."""

    def __init__(self, status: int, url: str):
        super().__init__(f"SWDI request failed with HTTP {status}: {url}")
        self.status = status


class SwdiEmptyBodyError(SwdiError):
    """Successful response with an empty body."""


@dataclass(frozen=True)
class RawRecord:
    """One data row as read from the file, before interpretation."""

    line_number: int
    fields: dict[str, str]


@dataclass
class Dataset:
    """Parsed events plus bookkeeping for rows that did not parse."""

    events: list[HailEvent]
    source: str
    skipped: list[tuple[int, str]] = field(default_factory=list)


def _parse_time(text: str, date_hint: date | None) -> datetime:
    text = text.strip()
    if ":" in text and "-" not in text and "T" not in text and " " not in text:
        # Bare HH:MM:SS; the date arrives out of band.
        if date_hint is None:
            raise ValueError("time-of-day value without a date")
        t = dtime.fromisoformat(text)
        return datetime.combine(date_hint, t, tzinfo=timezone.utc)
    iso = text.replace("Z", "+00:00") if text.endswith("Z") else text
    dt = datetime.fromisoformat(iso)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def _resolve_columns(header: Iterable[str]) -> dict[str, str]:
    by_upper = {name.strip().upper(): name for name in header}
    resolved = {}
    for key, synonyms in (("time", _TIME_COLUMNS), ("prob", _PROB_COLUMNS),
                          ("lon", ("LON",)), ("lat", ("LAT",))):
        for candidate in synonyms:
            if candidate in by_upper:
                resolved[key] = by_upper[candidate]
                break
        else:
            raise CsvFormatError(f"header is missing a {'/'.join(synonyms)} column")
    return resolved


def parse_csv(source, date_hint: date | None = None, name: str = "<csv>") -> Dataset:
    """Parse a hail-event CSV stream or string into a Dataset.

    ``date_hint`` supplies the calendar date for files whose time column
    holds bare HH:MM:SS values. Bad rows are recorded in ``skipped`` as
    (line_number, reason) with reasons ``bad-time``, ``bad-coordinate``,
    ``bad-probability`` or ``missing-field``.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.DictReader(source)
    if reader.fieldnames is None:
        raise CsvFormatError(f"{name}: empty input, no header row")
    columns = _resolve_columns(reader.fieldnames)
    events: list[HailEvent] = []
    skipped: list[tuple[int, str]] = []
    for record in (RawRecord(reader.line_num, dict(row)) for row in reader):
        fields = record.fields
        raw = {k: fields.get(col) for k, col in columns.items()}
        if any(v is None or v.strip() == "" for v in raw.values()):
            skipped.append((record.line_number, "missing-field"))
            continue
        try:
            when = _parse_time(raw["time"], date_hint)
        except ValueError:
            skipped.append((record.line_number, "bad-time"))
            continue
        try:
            lon = float(raw["lon"])
            lat = float(raw["lat"])
            if not (math.isfinite(lon) and math.isfinite(lat)):
                raise ValueError
        except ValueError:
            skipped.append((record.line_number, "bad-coordinate"))
            continue
        try:
            prob = float(raw["prob"])
            if prob > 1.0:
                prob /= 100.0  # integer percent
            if not 0.0 < prob <= 1.0:
                raise ValueError
        except ValueError:
            skipped.append((record.line_number, "bad-probability"))
            continue
        events.append(HailEvent(time=when, lon=lon, lat=lat, prob=prob))
    if not events:
        raise CsvFormatError(f"{name}: no rows parsed ({len(skipped)} skipped)")
    return Dataset(events=events, source=name, skipped=skipped)


def write_csv(dataset: Dataset) -> str:
    """Serialize a Dataset back to CSV text; parse_csv(write_csv(d)) round-trips."""
    if not dataset.events:
        raise ValueError("write_csv: dataset has no events")
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["ZTIME", "LON", "LAT", "PROB"])
    for e in dataset.events:
        stamp = e.time.astimezone(timezone.utc).replace(tzinfo=None).isoformat() + "Z"
        writer.writerow([stamp, repr(e.lon), repr(e.lat), repr(e.prob)])
    return out.getvalue()


def fetch_swdi(start_date: date, end_date: date, base_url: str = DEFAULT_SWDI_BASE,
               timeout: float = 30.0) -> str:
    """Fetch the raw hail CSV for a date range from the SWDI web service.

    Validates the range before any network activity, GETs
    ``<base>/csv/hail/<YYYYMMDD>:<YYYYMMDD>``, and returns the body
    untouched; parsing is the caller's job.
    """
    if start_date > end_date:
        raise ValueError(f"fetch_swdi: start {start_date} is after end {end_date}")
    url = f"{base_url.rstrip('/')}/csv/hail/{start_date:%Y%m%d}:{end_date:%Y%m%d}"
    try:
        response = requests.get(url, timeout=timeout)
    except requests.RequestException as exc:
        raise SwdiTransportError(f"SWDI request failed: {exc}") from exc
    if not 200 <= response.status_code < 300:
        raise SwdiStatusError(response.status_code, url)
    if not response.text.strip():
        raise SwdiEmptyBodyError(f"SWDI returned an empty body: {url}")
    return response.text
