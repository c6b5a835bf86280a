#!/usr/bin/env python3
"""
Series Store
============
Annual macro series: data model, bundled datasets, CSV persistence and
indicator API ingestion.

Bundled catalog (data/v1, see PROVENANCE.md):
  gdp_rs_crore_1971_2025     GDP, Rs crore
  exchange_rate_1971_2024    Rs per US$, annual avg
  gdp_rs_crore_1991_2025     GDP, Rs crore (1991 onward)

CSV layout: UTF-8, header `year,value`, LF line endings, plain numbers
(no digit grouping), dot decimal separator.
"""

import csv
import math
import os
from dataclasses import dataclass, field, replace
from datetime import date
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Optional, Tuple

import numpy as np
import requests

from .errors import (
    ConfigError, FetchError, PayloadError, SeriesFormatError, SpanError, YearGapError,
)

# ============================================================
# CONFIGURATION
# ============================================================

UNITS = ("rupee-crore", "usd", "rupees-per-usd", "usd-per-capita", "percent")

DEFAULT_DATA_DIR = Path(__file__).resolve().parents[2] / "data" / "v1"

WORLDBANK_API_URL = "https://api.worldbank.org/v2"
HTTP_TIMEOUT = float(os.getenv("FORECAST_HTTP_TIMEOUT", "15"))

# key -> (file name, unit, citation)
BUNDLED: Dict[str, Tuple[str, str, str]] = {
    "gdp_rs_crore_1971_2025": (
        "gdp_rs_crore_1971_2025.csv", "rupee-crore",
        "RBI GDP (Rs. Crores), transcribed from the published table 'GDP ($) from 1970-2024'",
    ),
    "exchange_rate_1971_2024": (
        "exchange_rate_1971_2024.csv", "rupees-per-usd",
        "RBI annual average Rs per US$, transcribed from the published table 'GDP ($) from 1970-2024'",
    ),
    "gdp_rs_crore_1991_2025": (
        "gdp_rs_crore_1991_2025.csv", "rupee-crore",
        "RBI GDP (Rs. Crores), transcribed from the published table 'GDP ($) from 1991-2024'",
    ),
}


def data_dir() -> Path:
    """Catalog directory, overridable with FORECAST_DATA_DIR."""
    override = os.getenv("FORECAST_DATA_DIR")
    return Path(override) if override else DEFAULT_DATA_DIR


# ============================================================
# DATA STRUCTURES
# ============================================================

@dataclass(frozen=True)
class AnnualSeries:
    """Consecutive annual observations of one indicator.

    Immutable: values are stored as a tuple, year of index i is
    first_year + i.
    """
    name: str
    unit: str
    first_year: int
    values: Tuple[float, ...]
    provenance: str = ""
    differences: int = 0  # d in Δ^d, set by stats_core.difference

    def __post_init__(self):
        if self.unit not in UNITS:
            raise SeriesFormatError(f"unknown unit '{self.unit}' (expected one of {', '.join(UNITS)})")
        values = tuple(float(v) for v in self.values)
        if not values:
            raise SeriesFormatError("series has no values")
        if not all(math.isfinite(v) for v in values):
            raise SeriesFormatError("series values must be finite")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "first_year", int(self.first_year))

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[Tuple[int, float]]:
        return iter(zip(self.years, self.values))

    @property
    def last_year(self) -> int:
        return self.first_year + len(self.values) - 1

    @property
    def years(self) -> List[int]:
        return list(range(self.first_year, self.last_year + 1))

    @property
    def unit_label(self) -> str:
        if self.differences == 0:
            return self.unit
        return f"Δ^{self.differences} {self.unit}"

    def value_at(self, year: int) -> float:
        if not self.first_year <= year <= self.last_year:
            raise SpanError(f"{self.name}: year {year} outside {self.first_year}-{self.last_year}")
        return self.values[year - self.first_year]

    def to_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def slice(self, start: int, end: int) -> "AnnualSeries":
        return slice_series(self, start, end)


@dataclass(frozen=True)
class DatasetCatalog:
    """Read-only map of dataset key -> (series, citation)."""
    entries: Dict[str, Tuple[AnnualSeries, str]] = field(default_factory=dict)

    @classmethod
    def bundled(cls, directory: Optional[Path] = None) -> "DatasetCatalog":
        directory = Path(directory) if directory else data_dir()
        entries = {}
        for key, (file_name, unit, citation) in BUNDLED.items():
            series = load_csv(directory / file_name, unit, name=key)
            entries[key] = (replace(series, provenance=citation), citation)
        return cls(entries=entries)

    def keys(self) -> List[str]:
        return sorted(self.entries)

    def get(self, key: str) -> AnnualSeries:
        if key not in self.entries:
            raise ConfigError(f"unknown catalog key '{key}' (available: {', '.join(self.keys())})")
        return self.entries[key][0]

    def citation(self, key: str) -> str:
        self.get(key)
        return self.entries[key][1]


# ============================================================
# SLICING
# ============================================================

def slice_series(series: AnnualSeries, start: int, end: int) -> AnnualSeries:
    """Restrict a series to [start, end] inclusive."""
    if start > end:
        raise SpanError(f"slice start {start} is after end {end}")
    if start < series.first_year or end > series.last_year:
        raise SpanError(
            f"{series.name}: requested {start}-{end}, available span is "
            f"{series.first_year}-{series.last_year}"
        )
    lo = start - series.first_year
    hi = end - series.first_year + 1
    return replace(series, first_year=start, values=series.values[lo:hi])


# ============================================================
# CSV PERSISTENCE
# ============================================================

def load_csv(path, unit: str, name: Optional[str] = None) -> AnnualSeries:
    """Load a `year,value` CSV.

    Errors name the offending file row (header is row 1).
    """
    path = Path(path)
    if not path.is_file():
        raise SeriesFormatError(f"file not found: {path}")

    with open(path, "r", encoding="utf-8", newline="") as f:
        rows = list(csv.reader(f))

    if not rows or [c.strip().lower() for c in rows[0]] != ["year", "value"]:
        raise SeriesFormatError("header must be 'year,value'", row=1)

    years: List[int] = []
    values: List[float] = []
    for row_no, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise SeriesFormatError(f"expected 2 columns, got {len(row)}", row=row_no)
        try:
            year = int(row[0].strip())
        except ValueError:
            raise SeriesFormatError(f"non-integer year '{row[0]}'", row=row_no) from None
        try:
            value = float(row[1].strip())
        except ValueError:
            raise SeriesFormatError(f"non-numeric value '{row[1]}'", row=row_no) from None
        if not math.isfinite(value):
            raise SeriesFormatError(f"non-finite value '{row[1]}'", row=row_no)
        if years and year <= years[-1]:
            raise SeriesFormatError(f"year {year} not ascending", row=row_no)
        if years and year != years[-1] + 1:
            raise YearGapError(years[-1] + 1, row=row_no)
        years.append(year)
        values.append(value)

    if not values:
        raise SeriesFormatError("file has no data rows", row=2)

    return AnnualSeries(
        name=name or path.stem,
        unit=unit,
        first_year=years[0],
        values=tuple(values),
        provenance=f"csv:{path.name}",
    )


def save_csv(series: AnnualSeries, path) -> Path:
    """Write a series as `year,value`; repr() keeps floats round-trip exact."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["year", "value"])
        for year, value in series:
            writer.writerow([year, repr(float(value))])
    return path


# ============================================================
# INDICATOR API CLIENT
# ============================================================

class IndicatorClient:
    """HTTP client for annual indicator endpoints.

    worldbank-atlas: World Bank v2 API, payload [meta, [{date, value}, ...]]
    generic-json:    any endpoint returning [{year, value}, ...]
    """

    SOURCES = ("worldbank-atlas", "generic-json")

    def __init__(self, base_url: str = WORLDBANK_API_URL, timeout: float = HTTP_TIMEOUT):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.on_log: Optional[Callable[[str], None]] = None

    def log(self, msg: str):
        if self.on_log:
            self.on_log(msg)

    def worldbank_url(self, indicator: str, country: str) -> str:
        return (f"{self.base_url}/country/{country}/indicator/{indicator}"
                f"?format=json&per_page=20000")

    def get_rows(self, source: str, endpoint: str) -> List[Tuple[int, Optional[float]]]:
        """GET the endpoint and return (year, value-or-None) rows, ascending."""
        if source not in self.SOURCES:
            raise PayloadError(f"unknown source '{source}' (expected {' | '.join(self.SOURCES)})")
        self.log(f"[FETCH] GET {endpoint}")
        try:
            resp = requests.get(endpoint, timeout=self.timeout)
            resp.raise_for_status()
            data = resp.json()
        except requests.RequestException as e:
            raise FetchError(f"request to {endpoint} failed: {e}") from e
        except ValueError as e:
            raise PayloadError(f"response from {endpoint} is not JSON: {e}") from e

        if source == "worldbank-atlas":
            rows = self._parse_worldbank(data)
        else:
            rows = self._parse_generic(data)
        self.log(f"[FETCH] {len(rows)} rows")
        return sorted(rows)

    def _parse_worldbank(self, data) -> List[Tuple[int, Optional[float]]]:
        if not isinstance(data, list) or len(data) < 2 or not isinstance(data[1], list):
            message = ""
            if isinstance(data, list) and data and isinstance(data[0], dict):
                message = f": {data[0].get('message', '')}"
            raise PayloadError(f"unexpected World Bank payload shape{message}")
        return [self._row(item.get("date"), item.get("value")) for item in data[1]
                if isinstance(item, dict)]

    def _parse_generic(self, data) -> List[Tuple[int, Optional[float]]]:
        if not isinstance(data, list):
            raise PayloadError("payload must be a JSON array of {year, value}")
        rows = []
        for item in data:
            if not isinstance(item, dict) or "year" not in item or "value" not in item:
                raise PayloadError(f"malformed record {item!r}")
            rows.append(self._row(item["year"], item["value"]))
        return rows

    @staticmethod
    def _row(year, value) -> Tuple[int, Optional[float]]:
        try:
            year = int(year)
        except (TypeError, ValueError):
            raise PayloadError(f"bad year {year!r}") from None
        if value is None:
            return year, None
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise PayloadError(f"bad value {value!r} for {year}") from None
        if not math.isfinite(value):
            return year, None
        return year, value


def rows_to_series(rows: List[Tuple[int, Optional[float]]], name: str, unit: str,
                   provenance: str) -> AnnualSeries:
    """Trim null ends; interior nulls or missing years are errors."""
    seen = set()
    for year, _ in rows:
        if year in seen:
            raise PayloadError(f"duplicate year {year}")
        seen.add(year)

    valid = [i for i, (_, v) in enumerate(rows) if v is not None]
    if not valid:
        raise PayloadError("payload has no non-null values")
    body = rows[valid[0]:valid[-1] + 1]

    for (prev_year, _), (year, value) in zip(body, body[1:]):
        if year != prev_year + 1:
            raise PayloadError(f"interior missing year {prev_year + 1}")
    for year, value in body:
        if value is None:
            raise PayloadError(f"interior missing year {year} (null value)")

    return AnnualSeries(
        name=name,
        unit=unit,
        first_year=body[0][0],
        values=tuple(v for _, v in body),
        provenance=provenance,
    )


def fetch_indicator(
    source: str,
    indicator: str,
    country: str,
    endpoint: Optional[str] = None,
    unit: str = "usd-per-capita",
    client: Optional[IndicatorClient] = None,
    on_log: Optional[Callable[[str], None]] = None,
) -> AnnualSeries:
    """Fetch one annual indicator series.

    For worldbank-atlas the endpoint defaults to the public v2 API; for
    generic-json it is required.
    """
    client = client or IndicatorClient()
    client.on_log = on_log or client.on_log
    if endpoint is None:
        if source != "worldbank-atlas":
            raise PayloadError("generic-json source needs an explicit endpoint")
        endpoint = client.worldbank_url(indicator, country)

    rows = client.get_rows(source, endpoint)
    provenance = f"{source} {indicator}/{country} from {endpoint} retrieved {date.today().isoformat()}"
    return rows_to_series(rows, name=f"{indicator}_{country}".lower(), unit=unit,
                          provenance=provenance)
