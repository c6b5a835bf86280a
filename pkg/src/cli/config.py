"""
Run Configuration
=================
Flat KEY=value documents, parsed with python-dotenv.

Run files: keys are the long flag names upper-cased, '-' -> '_'
(e.g. `--p-max 3` <-> `P_MAX=3`). Command-line flags override file values.

Scenario files use per-indicator prefixes:
  GDP_SOURCE=catalog:gdp_rs_crore_1971_2025
  GDP_WINDOW=1991-2025
  GDP_ORDER=0,2,1        (empty or 'auto' -> stepwise selection)
  GDP_DRIFT=false
  FX_* / GFD_* / GNI_*   same keys, optional UNIT
  END_YEAR=2047  LEVEL=95  THRESHOLD=14005  METHOD=exact-mle
or PRESET=sub|entire for the pinned GDP / exchange-rate pair.
"""

import io
import re
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Dict, Mapping, Optional, Tuple, Union

from dotenv import dotenv_values

from ..core.arima_engine import DRIFT_POLICIES, METHODS, VARIANCE_MODES, ArimaOrder, normalize_method
from ..core.errors import ConfigError, ForecastError
from ..core.scenario import (
    DEFAULT_END_YEAR, HIGH_INCOME_CAP, INDICATORS, IndicatorSpec, MacroScenario, pinned_scenario,
)
from ..core.series_store import AnnualSeries, DatasetCatalog, load_csv
from ..core.unit_root import normalize_deterministic

TESTS = ("adf", "pp", "both")
FORMATS = ("csv", "json", "md", "svg")
CATALOG_PREFIX = "catalog:"

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}
_SAFE_VALUE = re.compile(r"^[\w.,:/+%@-]*$")


def parse_bool(key: str, raw: str) -> bool:
    value = raw.strip().lower()
    if value in _TRUE:
        return True
    if value in _FALSE:
        return False
    raise ConfigError(f"{key}: expected a boolean, got '{raw}'")


def _read(source: Union[str, Path, None] = None, text: Optional[str] = None) -> Dict[str, str]:
    """KEY -> raw string; keys without '=' are errors."""
    if text is not None:
        values = dotenv_values(stream=io.StringIO(text))
    else:
        path = Path(source)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        values = dotenv_values(path)
    for key, value in values.items():
        if value is None:
            raise ConfigError(f"{key}: missing '=value'")
    return dict(values)


# ============================================================
# RUN CONFIG
# ============================================================

@dataclass(frozen=True)
class RunConfig:
    """Parameters of one CLI run. Every field is also a flag."""
    # Input
    data: str = ""                 # catalog:<key> or CSV path
    unit: str = ""                 # required for CSV input
    name: str = ""
    start: Optional[int] = None
    end: Optional[int] = None

    # Unit roots / correlogram
    test: str = "adf"
    det: str = "constant"
    lags: str = "0"                # integer or 'aic'
    bandwidth: str = "auto"        # integer or 'auto'
    critical_source: str = "table"
    diff: int = 0
    max_lag: Optional[int] = None

    # Models
    order: str = ""
    drift: Optional[bool] = None   # None: off for a fixed order, AIC choice under stepwise
    drift_policy: str = "auto"
    p_max: int = 3
    d_min: int = 0
    d_max: int = 2
    q_max: int = 3
    method: str = "exact-mle"

    # Forecast
    horizon: Optional[int] = None
    end_year: Optional[int] = None
    level: float = 95.0
    variance: str = "df"

    # Ingest
    source: str = "worldbank-atlas"
    indicator: str = ""
    country: str = "IND"
    endpoint: str = ""

    # Output
    out: str = "out"
    formats: str = "csv,json,md,svg"
    workers: Optional[int] = None  # None -> FORECAST_WORKERS

    def __post_init__(self):
        if self.test not in TESTS:
            raise ConfigError(f"TEST must be one of {', '.join(TESTS)}, got '{self.test}'")
        try:
            normalize_deterministic(self.det)
            normalize_method(self.method)
        except ForecastError as e:
            raise ConfigError(str(e)) from e
        if self.drift_policy not in DRIFT_POLICIES:
            raise ConfigError(f"DRIFT_POLICY must be one of {', '.join(DRIFT_POLICIES)}")
        if self.variance not in VARIANCE_MODES:
            raise ConfigError(f"VARIANCE must be one of {', '.join(VARIANCE_MODES)}")
        if self.critical_source not in ("table", "surface"):
            raise ConfigError(f"CRITICAL_SOURCE must be table or surface, got '{self.critical_source}'")
        _int_or_word("LAGS", self.lags, "aic")
        _int_or_word("BANDWIDTH", self.bandwidth, "auto")
        unknown = set(self.format_set) - set(FORMATS)
        if unknown:
            raise ConfigError(f"FORMATS: unknown {', '.join(sorted(unknown))} (expected {', '.join(FORMATS)})")
        if self.workers is not None and self.workers < 1:
            raise ConfigError(f"WORKERS must be >= 1, got {self.workers}")

    @staticmethod
    def key_for(name: str) -> str:
        return name.upper()

    @classmethod
    def parse(cls, text: str) -> "RunConfig":
        return cls.from_values(_read(text=text))

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.from_values(_read(path))

    @classmethod
    def from_values(cls, values: Mapping[str, str]) -> "RunConfig":
        kinds = {cls.key_for(f.name): f for f in fields(cls)}
        unknown = sorted(set(values) - set(kinds))
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
        kwargs = {}
        for key, raw in values.items():
            f = kinds[key]
            kwargs[f.name] = _convert(key, f.default, raw)
        return cls(**kwargs)

    def merged(self, overrides: Mapping[str, object]) -> "RunConfig":
        """Flag values win; None means 'not given'."""
        names = {f.name for f in fields(self)}
        unknown = sorted(set(overrides) - names)
        if unknown:
            raise ConfigError(f"unknown setting(s): {', '.join(unknown)}")
        given = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **given) if given else self

    def to_text(self) -> str:
        """Non-default settings as KEY=value lines."""
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value == f.default or value is None:
                continue
            lines.append(f"{self.key_for(f.name)}={_render(self.key_for(f.name), value)}")
        return "\n".join(lines) + ("\n" if lines else "")

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def lag_spec(self) -> Union[int, str]:
        return _int_or_word("LAGS", self.lags, "aic")

    @property
    def bandwidth_spec(self) -> Union[int, str]:
        return _int_or_word("BANDWIDTH", self.bandwidth, "auto")

    @property
    def format_set(self) -> Tuple[str, ...]:
        return tuple(part.strip() for part in self.formats.split(",") if part.strip())

    @property
    def arima_order(self) -> ArimaOrder:
        if not self.order:
            raise ConfigError("an order is required (--order p,d,q)")
        return ArimaOrder.parse(self.order)


def _convert(key: str, default, raw: str):
    raw = raw.strip()
    try:
        if isinstance(default, bool):
            return parse_bool(key, raw)
        if isinstance(default, int):
            return int(raw)
        if key == "DRIFT":
            return parse_bool(key, raw) if raw else None
        if default is None:  # optional integers
            return int(raw) if raw else None
        if isinstance(default, float):
            return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got '{raw}'") from None
    return raw


def _render(key: str, value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    text = str(value)
    if _SAFE_VALUE.match(text):
        return text
    if "'" in text:
        raise ConfigError(f"{key}: value contains a single quote")
    return f"'{text}'"


def _int_or_word(key: str, raw: str, word: str) -> Union[int, str]:
    text = str(raw).strip().lower()
    if text == word:
        return word
    try:
        value = int(text)
    except ValueError:
        raise ConfigError(f"{key} must be a non-negative integer or '{word}', got '{raw}'") from None
    if value < 0:
        raise ConfigError(f"{key} must be >= 0, got {value}")
    return value


# ============================================================
# DATA RESOLUTION
# ============================================================

def resolve_data(spec: str, unit: str = "", catalog: Optional[DatasetCatalog] = None,
                 name: str = "") -> AnnualSeries:
    """`catalog:<key>` from the bundled catalog, otherwise a CSV path."""
    if not spec:
        raise ConfigError("no input data (--data catalog:<key> or a CSV path)")
    if spec.startswith(CATALOG_PREFIX):
        catalog = catalog or DatasetCatalog.bundled()
        series = catalog.get(spec[len(CATALOG_PREFIX):])
        if unit and unit != series.unit:
            raise ConfigError(f"{spec} is in {series.unit}, not {unit}")
        return replace(series, name=name) if name else series
    if not unit:
        raise ConfigError("CSV input needs a unit (--unit)")
    return load_csv(spec, unit, name=name or None)


def select_window(series: AnnualSeries, start: Optional[int], end: Optional[int]) -> AnnualSeries:
    if start is None and end is None:
        return series
    return series.slice(series.first_year if start is None else start,
                        series.last_year if end is None else end)


# ============================================================
# SCENARIO FILES
# ============================================================

DEFAULT_UNITS = {
    "gdp": "rupee-crore",
    "fx": "rupees-per-usd",
    "gfd": "rupee-crore",
    "gni": "usd-per-capita",
}
_INDICATOR_KEYS = ("SOURCE", "UNIT", "WINDOW", "ORDER", "DRIFT")
_SCENARIO_KEYS = ("END_YEAR", "LEVEL", "THRESHOLD", "METHOD", "PRESET", "GNI_END")


def parse_window(key: str, raw: str) -> Optional[Tuple[int, int]]:
    if not raw.strip():
        return None
    match = re.fullmatch(r"\s*(\d{4})\s*-\s*(\d{4})\s*", raw)
    if not match:
        raise ConfigError(f"{key}: expected 'YYYY-YYYY', got '{raw}'")
    return int(match.group(1)), int(match.group(2))


def _indicator_spec(prefix: str, values: Mapping[str, str],
                    catalog: Optional[DatasetCatalog]) -> Optional[IndicatorSpec]:
    source = values.get(f"{prefix}_SOURCE", "").strip()
    if not source:
        extra = [f"{prefix}_{k}" for k in _INDICATOR_KEYS if f"{prefix}_{k}" in values]
        if extra:
            raise ConfigError(f"{', '.join(extra)} given without {prefix}_SOURCE")
        return None
    name = prefix.lower()
    unit = values.get(f"{prefix}_UNIT", "").strip() or DEFAULT_UNITS[name]
    order_text = values.get(f"{prefix}_ORDER", "").strip()
    order = None if order_text.lower() in ("", "auto") else ArimaOrder.parse(order_text)
    drift_text = values.get(f"{prefix}_DRIFT", "").strip()
    drift = parse_bool(f"{prefix}_DRIFT", drift_text) if drift_text else None
    window = parse_window(f"{prefix}_WINDOW", values.get(f"{prefix}_WINDOW", ""))
    return IndicatorSpec(resolve_data(source, unit, catalog), window, order, drift)


def scenario_from_values(values: Mapping[str, str],
                         catalog: Optional[DatasetCatalog] = None) -> MacroScenario:
    allowed = set(_SCENARIO_KEYS) | {f"{p.upper()}_{k}" for p in INDICATORS for k in _INDICATOR_KEYS}
    unknown = sorted(set(values) - allowed)
    if unknown:
        raise ConfigError(f"unknown scenario key(s): {', '.join(unknown)}")

    try:
        end_year = int(values.get("END_YEAR", DEFAULT_END_YEAR))
        level = float(values.get("LEVEL", 95))
        threshold = float(values.get("THRESHOLD", HIGH_INCOME_CAP))
        gni_text = values.get("GNI_END", "").strip()
        gni_end = float(gni_text) if gni_text else None
    except ValueError as e:
        raise ConfigError(f"scenario: {e}") from None
    method = values.get("METHOD", METHODS[0]).strip()

    preset = values.get("PRESET", "").strip()
    if preset:
        base = pinned_scenario(catalog or DatasetCatalog.bundled(), preset, end_year)
    else:
        base = MacroScenario(end_year=end_year)

    specs = {name: _indicator_spec(name.upper(), values, catalog) for name in INDICATORS}
    specs = {name: spec for name, spec in specs.items() if spec is not None}
    return replace(base, level=level, threshold=threshold, method=method, gni_end=gni_end, **specs)


def load_scenario(path, catalog: Optional[DatasetCatalog] = None) -> MacroScenario:
    return scenario_from_values(_read(path), catalog)


def parse_scenario(text: str, catalog: Optional[DatasetCatalog] = None) -> MacroScenario:
    return scenario_from_values(_read(text=text), catalog)
