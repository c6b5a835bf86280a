# Core forecasting modules
from .errors import ForecastError, ScenarioError
from .series_store import (
    AnnualSeries, DatasetCatalog, IndicatorClient,
    load_csv, save_csv, slice_series, fetch_indicator,
)
from .stats_core import Correlogram, RegressionFit, difference, correlogram, ols, newey_west_lrv
from .unit_root import (
    UnitRootReport, adf_test, pp_test, mackinnon_critical, mackinnon_pvalue,
    integration_order, significance_stars,
)
from .arima_engine import (
    ArimaOrder, ArimaFit, FitOptions, ForecastTable, GridResult, StepwiseResult,
    fit, information_criteria, grid_search, auto_select, auto_fit, stepwise_search, forecast,
)
from .scenario import (
    IncomeBand, IndicatorSpec, MacroScenario, ScenarioReport,
    convert_currency, ratio_series, cagr, required_growth, classify_income,
    extend_with_forecast, run_scenario, pinned_scenario,
)
from .run_logger import (
    RunLogger, init_run_logger, get_run_logger,
    run_log_start, run_log_stop, run_log_command, run_log_fit, run_log_error,
)

__all__ = [
    # Errors
    'ForecastError', 'ScenarioError',
    # Series
    'AnnualSeries', 'DatasetCatalog', 'IndicatorClient',
    'load_csv', 'save_csv', 'slice_series', 'fetch_indicator',
    # Stats
    'Correlogram', 'RegressionFit', 'difference', 'correlogram', 'ols', 'newey_west_lrv',
    # Unit roots
    'UnitRootReport', 'adf_test', 'pp_test', 'mackinnon_critical', 'mackinnon_pvalue',
    'integration_order', 'significance_stars',
    # ARIMA
    'ArimaOrder', 'ArimaFit', 'FitOptions', 'ForecastTable', 'GridResult', 'StepwiseResult',
    'fit', 'information_criteria', 'grid_search', 'auto_select', 'auto_fit', 'stepwise_search', 'forecast',
    # Scenario
    'IncomeBand', 'IndicatorSpec', 'MacroScenario', 'ScenarioReport',
    'convert_currency', 'ratio_series', 'cagr', 'required_growth', 'classify_income',
    'extend_with_forecast', 'run_scenario', 'pinned_scenario',
    # Logger
    'RunLogger', 'init_run_logger', 'get_run_logger',
    'run_log_start', 'run_log_stop', 'run_log_command', 'run_log_fit', 'run_log_error',
]
