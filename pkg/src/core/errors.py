"""
Forecast Toolkit Errors
=======================
One hierarchy for every failure the library reports.

ForecastError
  ├── SeriesFormatError      bad CSV row (carries row number)
  ├── YearGapError           non-contiguous years (carries missing year)
  ├── SpanError              slice outside the available span
  ├── FetchError             network failure
  ├── PayloadError           malformed / gapped indicator payload
  ├── InsufficientDataError
  ├── ZeroVarianceError      constant series
  ├── SingularDesignError    rank-deficient regression
  ├── ParameterError         bad argument (lags, level, bounds)
  ├── DegenerateSeriesError  exact fit, zero residual variance
  ├── NonStationaryError     no differencing order rejects
  ├── ConvergenceError       optimizer gave up
  ├── NonInvertibleError
  ├── OverlapError           derived series with no common years
  ├── NonPositiveValueError
  ├── ConfigError
  ├── OutputError            unwritable output path
  └── ScenarioError          wraps the above with indicator context
"""

from typing import Optional


class ForecastError(Exception):
    """Base class for all toolkit errors."""


class SeriesFormatError(ForecastError, ValueError):
    def __init__(self, message: str, row: Optional[int] = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class YearGapError(SeriesFormatError):
    def __init__(self, missing_year: int, row: Optional[int] = None):
        self.missing_year = missing_year
        super().__init__(f"year {missing_year} is missing (years must be contiguous)", row)


class SpanError(ForecastError, ValueError):
    pass


class FetchError(ForecastError):
    pass


class PayloadError(ForecastError, ValueError):
    pass


class InsufficientDataError(ForecastError, ValueError):
    pass


class ZeroVarianceError(ForecastError, ValueError):
    pass


class SingularDesignError(ForecastError, ValueError):
    pass


class ParameterError(ForecastError, ValueError):
    pass


class DegenerateSeriesError(ForecastError, ValueError):
    pass


class NonStationaryError(ForecastError):
    pass


class ConvergenceError(ForecastError):
    pass


class NonInvertibleError(ForecastError):
    pass


class OverlapError(ForecastError, ValueError):
    pass


class NonPositiveValueError(ForecastError, ValueError):
    pass


class ConfigError(ForecastError, ValueError):
    pass


class ScenarioError(ForecastError):
    def __init__(self, indicator: str, cause: Exception):
        self.indicator = indicator
        self.cause = cause
        super().__init__(f"[{indicator}] {cause}")


class OutputError(ForecastError):
    """Artifact could not be written."""
