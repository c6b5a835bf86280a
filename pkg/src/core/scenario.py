#!/usr/bin/env python3
"""
Development Scenario
====================
Derived development-status analytics on top of the per-indicator forecasts.

  GDP ($)        = GDP (Rs crore) / exchange rate        -> US$ crore
  GFD ratio      = 100 · GFD / GDP                       -> percent
  CAGR           = (end / start)^(1/years) - 1
  required CAGR  = (threshold / current)^(1/years) - 1

Income bands (GNI per capita, current US$, Atlas method), quoted ranges
inclusive:
  low            < 1146
  lower-middle   1146 - 4515
  upper-middle   4516 - 14005
  high           > 14005
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple

from .arima_engine import (
    ArimaFit, ArimaOrder, FitOptions, ForecastTable, auto_fit, fit, forecast,
)
from .errors import (
    ForecastError, InsufficientDataError, NonPositiveValueError, NonStationaryError,
    OverlapError, ParameterError, ScenarioError,
)
from .series_store import AnnualSeries, DatasetCatalog
from .unit_root import integration_order

# ============================================================
# CONFIGURATION
# ============================================================

LOWER_MIDDLE_FLOOR = 1146.0
UPPER_MIDDLE_FLOOR = 4516.0
HIGH_INCOME_CAP = 14005.0

DEFAULT_END_YEAR = 2047

INDICATORS = ("gdp", "fx", "gfd", "gni")

DEVELOPED_GDP_FORMULA = "threshold / gni_end * gdp_usd_end"


class IncomeBand(Enum):
    LOW = "low"
    LOWER_MIDDLE = "lower-middle"
    UPPER_MIDDLE = "upper-middle"
    HIGH = "high"

    @property
    def rank(self) -> int:
        return list(IncomeBand).index(self)

    @property
    def bounds(self) -> Tuple[float, float]:
        """Quoted (inclusive) range; the outer bands are open-ended."""
        return {
            IncomeBand.LOW: (0.0, LOWER_MIDDLE_FLOOR - 1),
            IncomeBand.LOWER_MIDDLE: (LOWER_MIDDLE_FLOOR, UPPER_MIDDLE_FLOOR - 1),
            IncomeBand.UPPER_MIDDLE: (UPPER_MIDDLE_FLOOR, HIGH_INCOME_CAP),
            IncomeBand.HIGH: (HIGH_INCOME_CAP, math.inf),
        }[self]


# ============================================================
# DATA STRUCTURES
# ============================================================

@dataclass(frozen=True)
class IndicatorSpec:
    """One indicator of a scenario. order=None selects the model stepwise."""
    series: AnnualSeries
    window: Optional[Tuple[int, int]] = None
    order: Optional[ArimaOrder] = None
    drift: Optional[bool] = None  # None: False for a fixed order, AIC choice under stepwise

    def sample(self) -> AnnualSeries:
        if self.window is None:
            return self.series
        return self.series.slice(*self.window)


@dataclass(frozen=True)
class MacroScenario:
    gdp: Optional[IndicatorSpec] = None
    fx: Optional[IndicatorSpec] = None
    gfd: Optional[IndicatorSpec] = None
    gni: Optional[IndicatorSpec] = None
    end_year: int = DEFAULT_END_YEAR
    level: float = 0.95
    threshold: float = HIGH_INCOME_CAP
    gni_end: Optional[float] = None  # GNI per capita at end_year from outside, when no gni indicator
    method: str = "exact-mle"
    fit_options: FitOptions = field(default_factory=FitOptions)

    def specs(self) -> Dict[str, IndicatorSpec]:
        return {name: getattr(self, name) for name in INDICATORS if getattr(self, name) is not None}


@dataclass(frozen=True)
class IndicatorResult:
    name: str
    sample: AnnualSeries
    integration_order: Optional[int]  # None when the ADF search found no rejection
    fit: ArimaFit
    forecast: ForecastTable
    extended: AnnualSeries            # actual + forecast points
    selected: str                     # "override" | "stepwise"


@dataclass(frozen=True)
class Annotation:
    label: str
    value: float
    formula: str


@dataclass(frozen=True)
class ScenarioReport:
    end_year: int
    indicators: Dict[str, IndicatorResult]
    gdp_usd: Optional[AnnualSeries] = None
    gfd_ratio: Optional[AnnualSeries] = None
    gni_end: Optional[float] = None
    band_end: Optional[IncomeBand] = None
    forecast_cagr: Optional[float] = None
    required_cagr: Optional[float] = None
    annotations: Tuple[Annotation, ...] = ()

    def to_dict(self) -> dict:
        def series_rows(s: Optional[AnnualSeries]):
            return None if s is None else [[year, value] for year, value in s]

        return {
            "end_year": self.end_year,
            "indicators": {
                name: {
                    "window": [r.sample.first_year, r.sample.last_year],
                    "integration_order": r.integration_order,
                    "selected": r.selected,
                    "fit": r.fit.to_dict(),
                    "forecast": r.forecast.to_dict(),
                }
                for name, r in self.indicators.items()
            },
            "gdp_usd": series_rows(self.gdp_usd),
            "gfd_ratio": series_rows(self.gfd_ratio),
            "gni_end": self.gni_end,
            "band_end": self.band_end.value if self.band_end else None,
            "forecast_cagr": self.forecast_cagr,
            "required_cagr": self.required_cagr,
            "annotations": [
                {"label": a.label, "value": a.value, "formula": a.formula} for a in self.annotations
            ],
        }


# ============================================================
# DERIVATIONS
# ============================================================

def _overlap(a: AnnualSeries, b: AnnualSeries) -> Tuple[int, int]:
    start = max(a.first_year, b.first_year)
    end = min(a.last_year, b.last_year)
    if start > end:
        raise OverlapError(
            f"{a.name} ({a.first_year}-{a.last_year}) and {b.name} "
            f"({b.first_year}-{b.last_year}) share no years"
        )
    return start, end


def convert_currency(gdp_rs: AnnualSeries, fx: AnnualSeries) -> AnnualSeries:
    """GDP in Rs crore divided by Rs per US$ -> US$ crore, on the overlap."""
    start, end = _overlap(gdp_rs, fx)
    values = []
    for year in range(start, end + 1):
        rate = fx.value_at(year)
        if rate <= 0.0:
            raise NonPositiveValueError(f"{fx.name}: exchange rate {rate} in {year} is not positive")
        values.append(gdp_rs.value_at(year) / rate)
    return AnnualSeries(
        name="gdp_usd",
        unit="usd",
        first_year=start,
        values=tuple(values),
        provenance=f"{gdp_rs.name} / {fx.name} (US$ crore)",
    )


def ratio_series(numerator: AnnualSeries, denominator: AnnualSeries) -> AnnualSeries:
    """100 · num / den on the overlap."""
    start, end = _overlap(numerator, denominator)
    values = []
    for year in range(start, end + 1):
        den = denominator.value_at(year)
        if den == 0.0:
            raise ParameterError(f"{denominator.name} is zero in {year}")
        values.append(100.0 * numerator.value_at(year) / den)
    return AnnualSeries(
        name=f"{numerator.name}_pct_{denominator.name}",
        unit="percent",
        first_year=start,
        values=tuple(values),
        provenance=f"100 * {numerator.name} / {denominator.name}",
    )


def _check_growth_inputs(a: float, b: float, years: int, names: Tuple[str, str]):
    for name, value in zip(names, (a, b)):
        if not value > 0.0:
            raise NonPositiveValueError(f"{name} must be positive, got {value}")
    if years < 1:
        raise ParameterError(f"years must be >= 1, got {years}")


def cagr(v_start: float, v_end: float, years: int) -> float:
    _check_growth_inputs(v_start, v_end, years, ("v_start", "v_end"))
    return (v_end / v_start) ** (1.0 / years) - 1.0


def required_growth(current: float, threshold: float, years: int) -> float:
    """Annual growth that takes current to threshold; negative if already above."""
    _check_growth_inputs(current, threshold, years, ("current", "threshold"))
    return (threshold / current) ** (1.0 / years) - 1.0


def classify_income(gni_pc: float) -> IncomeBand:
    if not gni_pc > 0.0:
        raise NonPositiveValueError(f"GNI per capita must be positive, got {gni_pc}")
    if gni_pc < LOWER_MIDDLE_FLOOR:
        return IncomeBand.LOW
    if gni_pc < UPPER_MIDDLE_FLOOR:
        return IncomeBand.LOWER_MIDDLE
    if gni_pc <= HIGH_INCOME_CAP:
        return IncomeBand.UPPER_MIDDLE
    return IncomeBand.HIGH


def extend_with_forecast(series: AnnualSeries, table: ForecastTable) -> AnnualSeries:
    """Observed values followed by point forecasts."""
    if table.rows[0].year != series.last_year + 1:
        raise ParameterError(
            f"{series.name}: forecast starts {table.rows[0].year}, expected {series.last_year + 1}"
        )
    return replace(
        series,
        values=series.values + tuple(table.points),
        provenance=f"{series.provenance}; forecast ARIMA{table.order}{'+drift' if table.drift else ''}",
    )


def developed_gdp(threshold: float, gni_end: float, gdp_usd_end: float) -> float:
    """GDP ($) at which GNI per capita would reach the threshold, scaling proportionally."""
    if not gni_end > 0.0:
        raise NonPositiveValueError(f"gni_end must be positive, got {gni_end}")
    return threshold / gni_end * gdp_usd_end


# ============================================================
# PIPELINE
# ============================================================

def _run_indicator(name: str, spec: IndicatorSpec, config: MacroScenario,
                   log: Callable[[str], None]) -> IndicatorResult:
    try:
        sample = spec.sample()
        if config.end_year <= sample.last_year:
            raise ParameterError(
                f"end_year {config.end_year} must be after the last observed year {sample.last_year}"
            )
        horizon = config.end_year - sample.last_year

        try:
            d = integration_order(sample)
        except (NonStationaryError, InsufficientDataError):
            if spec.order is None:
                raise
            d = None

        if spec.order is not None:
            model = fit(sample, spec.order, drift=bool(spec.drift), method=config.method, options=config.fit_options)
            selected = "override"
        else:
            model = auto_fit(sample, drift=spec.drift, method=config.method, options=config.fit_options)
            selected = "stepwise"
        table = forecast(model, horizon, level=config.level)
    except ForecastError as e:
        raise ScenarioError(name, e) from e

    log(f"[SCENARIO] {name}: {sample.first_year}-{sample.last_year} d={d} "
        f"ARIMA{model.order}{'+drift' if model.drift else ''} ({selected}) "
        f"{config.end_year}={table.points[-1]:.4f}")
    return IndicatorResult(
        name=name,
        sample=sample,
        integration_order=d,
        fit=model,
        forecast=table,
        extended=extend_with_forecast(sample, table),
        selected=selected,
    )


def run_scenario(
    config: MacroScenario,
    workers: int = 1,
    on_log: Optional[Callable[[str], None]] = None,
) -> ScenarioReport:
    """Forecast every configured indicator to end_year, then derive the outputs."""
    specs = config.specs()
    if not specs:
        raise ParameterError("scenario has no indicators")
    log = on_log or (lambda msg: None)

    if workers > 1 and len(specs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {name: pool.submit(_run_indicator, name, spec, config, log)
                       for name, spec in specs.items()}
            results = {name: futures[name].result() for name in specs}
    else:
        results = {name: _run_indicator(name, spec, config, log) for name, spec in specs.items()}

    end = config.end_year
    derived: Dict[str, object] = {}
    annotations: List[Annotation] = []

    try:
        if "gdp" in results and "fx" in results:
            derived["gdp_usd"] = convert_currency(results["gdp"].extended, results["fx"].extended)
        if "gfd" in results and "gdp" in results:
            derived["gfd_ratio"] = ratio_series(results["gfd"].extended, results["gdp"].extended)
    except ForecastError as e:
        raise ScenarioError("derived", e) from e

    if "gni" in results:
        gni = results["gni"].forecast
        first = gni.rows[0]
        gni_end = gni.point_at(end)
        years = end - first.year
        try:
            derived["gni_end"] = gni_end
            derived["band_end"] = classify_income(gni_end)
            if years >= 1:
                derived["forecast_cagr"] = cagr(first.point, gni_end, years)
                derived["required_cagr"] = required_growth(first.point, config.threshold, years)
        except ForecastError as e:
            raise ScenarioError("gni", e) from e

    gdp_usd = derived.get("gdp_usd")
    gni_end = derived.get("gni_end", config.gni_end)
    if gni_end is not None and gdp_usd is not None and gdp_usd.last_year >= end:
        try:
            value = developed_gdp(config.threshold, gni_end, gdp_usd.value_at(end))
        except ForecastError as e:
            raise ScenarioError("gni", e) from e
        annotations.append(Annotation(
            label=f"developed_gdp_usd_{end}_from_{gdp_usd.first_year}",
            value=value,
            formula=DEVELOPED_GDP_FORMULA if "gni" in results else f"{DEVELOPED_GDP_FORMULA}, gni_end given",
        ))

    log(f"[SCENARIO] derived: {', '.join(sorted(derived)) or 'none'}")
    return ScenarioReport(
        end_year=end,
        indicators=results,
        annotations=tuple(annotations),
        **derived,
    )


def pinned_scenario(catalog: DatasetCatalog, period: str = "sub", end_year: int = DEFAULT_END_YEAR,
                    gni_end: Optional[float] = None) -> MacroScenario:
    """Pinned GDP / exchange-rate models on the bundled data.

    sub     GDP 1991-2025 ARIMA(0,2,1), FX 1991-2024 ARIMA(0,1,0)+drift
    entire  GDP 1971-2025 ARIMA(0,2,1), FX 1971-2024 ARIMA(0,1,0)+drift
    """
    if period == "sub":
        gdp_window, fx_window = (1991, 2025), (1991, 2024)
    elif period == "entire":
        gdp_window, fx_window = (1971, 2025), (1971, 2024)
    else:
        raise ParameterError(f"period must be 'sub' or 'entire', got '{period}'")
    return MacroScenario(
        gdp=IndicatorSpec(catalog.get("gdp_rs_crore_1971_2025"), gdp_window, ArimaOrder(0, 2, 1), False),
        fx=IndicatorSpec(catalog.get("exchange_rate_1971_2024"), fx_window, ArimaOrder(0, 1, 0), True),
        end_year=end_year,
        gni_end=gni_end,
    )
