#!/usr/bin/env python3
"""
Forecast CLI
============
Command group over the library:

  ingest           fetch an annual indicator and save it as CSV
  unitroot         ADF / Phillips-Perron tables
  correlogram      ACF / PACF with the white-noise band
  fit              one ARIMA(p,d,q) fit
  grid             AIC / BIC over an order lattice
  autofit          stepwise order selection
  forecast         h-step forecasts with intervals
  scenario         multi-indicator 2047 scenario
  reproduce-paper  pinned reproduction run plus the verification suite

Exit status: 0 success, 1 data / model error, 2 usage error.
Artifacts go to --out; the run log goes to --log-dir.
"""

import functools
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Callable, List, Optional

import click

from ..core.arima_engine import (
    ArimaFit, ArimaOrder, ForecastTable, auto_fit, fit, forecast, grid_search, stepwise_search,
)
from ..core.errors import ForecastError
from ..core.run_logger import (
    init_run_logger, run_log_command, run_log_error, run_log_fit, run_log_start, run_log_stop,
)
from ..core.scenario import pinned_scenario, run_scenario
from ..core.series_store import AnnualSeries, DatasetCatalog, data_dir, fetch_indicator, save_csv
from ..core.stats_core import correlogram, difference
from ..core.unit_root import adf_test, pp_test
from ..report.plots import emit_plot
from ..report.tables import (
    ReportDocument, correlogram_markdown, forecast_markdown, grid_markdown, scenario_markdown,
    unit_root_csv, unit_root_markdown, write_json,
)
from ..report.verification import PUBLISHED, run_verification
from .config import RunConfig, load_scenario, resolve_data, select_window

VERSION = "1.0.0"
PROG_NAME = "forecast"


# ============================================================
# SHARED OPTIONS
# ============================================================

def _options(*decorators):
    def apply(func):
        for decorator in reversed(decorators):
            func = decorator(func)
        return func
    return apply


config_option = click.option("--config", "config_path", type=click.Path(dir_okay=False),
                             default=None, help="KEY=value run file; flags override it")
out_options = _options(
    click.option("--out", default=None, help="Output directory (default: out)"),
    click.option("--formats", default=None, help="Comma list of csv,json,md,svg"),
)
data_options = _options(
    click.option("--data", default=None, help="catalog:<key> or CSV path"),
    click.option("--unit", default=None, help="Unit of a CSV input"),
    click.option("--name", default=None, help="Series name used in outputs"),
    click.option("--start", type=int, default=None, help="First year of the sample"),
    click.option("--end", type=int, default=None, help="Last year of the sample"),
)
model_options = _options(
    click.option("--method", default=None, help="exact-mle | css"),
)


def _settings(config_path: Optional[str], command: str, **flags) -> RunConfig:
    base = RunConfig.load(config_path) if config_path else RunConfig()
    cfg = base.merged(flags)
    run_log_command(command, {k: v for k, v in sorted(cfg.to_dict().items()) if v not in (None, "")})
    return cfg


def _series(cfg: RunConfig) -> AnnualSeries:
    series = resolve_data(cfg.data, cfg.unit, name=cfg.name)
    return select_window(series, cfg.start, cfg.end)


def _verbose_log() -> Optional[Callable[[str], None]]:
    ctx = click.get_current_context()
    if ctx.find_root().meta.get("verbose"):
        return lambda msg: click.echo(msg, err=True)
    return None


def _log_fit(name: str, model: ArimaFit):
    run_log_fit(name, model.order.as_tuple(), model.drift, model.method,
                model.loglik, model.aic, model.bic, "degenerate" if model.degenerate else "ok")


def handle_errors(func):
    """ForecastError -> one-line diagnostic, exit 1."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ForecastError as e:
            run_log_error(f"{type(e).__name__}: {e}")
            raise click.ClickException(str(e)) from e
    return wrapper


# ============================================================
# EMISSION
# ============================================================

class Emitter:
    """Writes one command's artifacts under <out>/<stem>_<suffix>."""

    def __init__(self, cfg: RunConfig, stem: str):
        self.out = Path(cfg.out)
        self.formats = cfg.format_set
        self.stem = stem
        self.written: List[Path] = []

    def path(self, suffix: str, ext: str) -> Path:
        return self.out / f"{self.stem}_{suffix}.{ext}"

    def csv(self, suffix: str, writer: Callable[[Path], Path]):
        if "csv" in self.formats:
            self.written.append(writer(self.path(suffix, "csv")))

    def json(self, suffix: str, data):
        if "json" in self.formats:
            self.written.append(write_json(data, self.path(suffix, "json")))

    def markdown(self, suffix: str, doc: ReportDocument):
        if "md" in self.formats:
            self.written.append(doc.write(self.path(suffix, "md")))

    def plot(self, suffix: str, data, kind: str, title: str = "", history=None,
             doc: Optional[ReportDocument] = None):
        if "svg" in self.formats:
            path = emit_plot(data, kind, self.path(suffix, "svg"), title=title, history=history)
            self.written.append(path)
            if doc is not None:
                doc.add_plot(path)

    def report(self):
        for path in self.written:
            click.echo(f"wrote {path}")


def _document(title: str, heading: str, body: str, source: str) -> ReportDocument:
    doc = ReportDocument(title)
    doc.add(heading, body, source)
    return doc


def _fit_markdown(model: ArimaFit) -> str:
    lines = ["| Parameter | Value |", "|---|---|"]
    lines.extend(f"| ar.L{i} | {v:.4f} |" for i, v in enumerate(model.ar, start=1))
    lines.extend(f"| ma.L{i} | {v:.4f} |" for i, v in enumerate(model.ma, start=1))
    if model.drift or model.order.d == 0:
        lines.append(f"| mu | {model.mu:.4f} |")
    lines.append(f"| sigma2 | {model.sigma2:.4f} |")
    lines.extend([
        "",
        f"Log likelihood: {model.loglik:.4f}; AIC: {model.aic:.4f}; BIC: {model.bic:.4f}; "
        f"k = {model.k}; n = {model.n_eff}; method: {model.method}",
    ])
    if model.degenerate:
        lines.append("Degenerate fit: zero innovation variance.")
    return "\n".join(lines)


def _model_label(order: ArimaOrder, drift: bool) -> str:
    return f"ARIMA{order}{' + drift' if drift else ''}"


# ============================================================
# COMMAND GROUP
# ============================================================

@click.group(invoke_without_command=True)
@click.version_option(version=VERSION, prog_name=PROG_NAME)
@click.option("--log-dir", default=None, help="Run log directory (default: $FORECAST_LOG_DIR or logs)")
@click.option("--no-log", is_flag=True, help="Disable the run log")
@click.option("--verbose", "-v", is_flag=True, help="Echo search progress to stderr")
@click.pass_context
def cli(ctx: click.Context, log_dir: Optional[str], no_log: bool, verbose: bool):
    """Box-Jenkins ARIMA toolkit for annual macro series."""
    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_usage())
        ctx.exit(2)
    ctx.meta["verbose"] = verbose
    init_run_logger(log_dir=log_dir or os.getenv("FORECAST_LOG_DIR", "logs"), enabled=not no_log)
    argv = (ctx.obj or {}).get("argv", [])
    run_log_start([PROG_NAME, *argv], {"log_dir": log_dir, "verbose": verbose, "data_dir": str(data_dir())})


# ============================================================
# INGEST
# ============================================================

@cli.command()
@config_option
@click.option("--source", default=None, help="worldbank-atlas | generic-json")
@click.option("--indicator", default=None, help="Indicator code, e.g. NY.GNP.PCAP.CD")
@click.option("--country", default=None, help="Country code (default IND)")
@click.option("--endpoint", default=None, help="Explicit URL (required for generic-json)")
@click.option("--unit", default=None, help="Unit of the fetched series (default usd-per-capita)")
@click.option("--name", default=None, help="File stem (default <indicator>_<country>)")
@click.option("--out", default=None, help="Destination directory (default out/; the bundled catalog is never written)")
@handle_errors
def ingest(config_path, source, indicator, country, endpoint, unit, name, out):
    """Fetch an annual indicator and save it as year,value CSV."""
    cfg = _settings(config_path, "ingest", source=source, indicator=indicator, country=country,
                    endpoint=endpoint, unit=unit, name=name, out=out)
    if not cfg.indicator:
        raise click.UsageError("--indicator is required")
    series = fetch_indicator(
        cfg.source, cfg.indicator, cfg.country,
        endpoint=cfg.endpoint or None,
        unit=cfg.unit or "usd-per-capita",
        on_log=_verbose_log(),
    )
    dest = Path(cfg.out)
    dest.mkdir(parents=True, exist_ok=True)
    path = save_csv(series, dest / f"{cfg.name or series.name}.csv")
    with open(dest / "PROVENANCE.md", "a", encoding="utf-8") as f:
        f.write(f"- `{path.name}`: {series.provenance}\n")
    click.echo(f"wrote {path} ({series.first_year}-{series.last_year}, {len(series)} values)")


# ============================================================
# UNIT ROOTS / CORRELOGRAM
# ============================================================

@cli.command()
@config_option
@data_options
@click.option("--test", default=None, help="adf | pp | both")
@click.option("--det", default=None, help="none | constant | constant+trend")
@click.option("--lags", default=None, help="ADF lagged differences, or 'aic'")
@click.option("--bandwidth", default=None, help="PP Newey-West lags, or 'auto'")
@click.option("--critical-source", default=None, help="table | surface")
@click.option("--diff", type=int, default=None, help="Also test differences up to this order")
@out_options
@handle_errors
def unitroot(config_path, data, unit, name, start, end, test, det, lags, bandwidth,
             critical_source, diff, out, formats):
    """ADF / Phillips-Perron unit-root tests."""
    cfg = _settings(config_path, "unitroot", data=data, unit=unit, name=name, start=start, end=end,
                    test=test, det=det, lags=lags, bandwidth=bandwidth,
                    critical_source=critical_source, diff=diff, out=out, formats=formats)
    series = _series(cfg)
    reports = []
    for d in range(cfg.diff + 1):
        target = difference(series, d)
        label = series.name if d == 0 else f"D{d}.{series.name}"
        target = replace(target, name=label)
        if cfg.test in ("adf", "both"):
            reports.append(adf_test(target, cfg.det, cfg.lag_spec, critical_source=cfg.critical_source))
        if cfg.test in ("pp", "both"):
            reports.append(pp_test(target, cfg.det, cfg.bandwidth_spec, critical_source=cfg.critical_source))

    body = unit_root_markdown(reports)
    emit = Emitter(cfg, series.name)
    emit.csv("unitroot", lambda path: unit_root_csv(reports, path))
    emit.json("unitroot", [r.to_dict() for r in reports])
    emit.markdown("unitroot", _document(f"Unit-root tests: {series.name}", "Results", body,
                                        "unit_root.adf_test / unit_root.pp_test"))
    click.echo(body)
    emit.report()


@cli.command(name="correlogram")
@config_option
@data_options
@click.option("--max-lag", type=int, default=None, help="Largest lag (default min(n//2 - 1, 24))")
@click.option("--diff", type=int, default=None, help="Difference order before computing")
@out_options
@handle_errors
def correlogram_cmd(config_path, data, unit, name, start, end, max_lag, diff, out, formats):
    """ACF and PACF with the 95% white-noise band."""
    cfg = _settings(config_path, "correlogram", data=data, unit=unit, name=name, start=start, end=end,
                    max_lag=max_lag, diff=diff, out=out, formats=formats)
    series = difference(_series(cfg), cfg.diff)
    corr = correlogram(series, cfg.max_lag)

    suffix = "correlogram" if cfg.diff == 0 else f"d{cfg.diff}_correlogram"
    body = correlogram_markdown(corr)
    doc = _document(f"Correlogram: {series.name} ({series.unit_label})", "ACF / PACF", body,
                    "stats_core.correlogram")
    emit = Emitter(cfg, series.name)
    emit.csv(suffix, corr.to_csv)
    emit.json(suffix, {"n": corr.n, "max_lag": corr.max_lag, "band": corr.band,
                       "acf": corr.acf, "pacf": corr.pacf})
    emit.plot(suffix, corr, "correlogram", title=f"{series.name} ({series.unit_label})", doc=doc)
    emit.markdown(suffix, doc)
    click.echo(body)
    emit.report()


# ============================================================
# MODELS
# ============================================================

@cli.command(name="fit")
@config_option
@data_options
@click.option("--order", default=None, help="p,d,q")
@click.option("--drift/--no-drift", default=None, help="Estimate a constant in the differenced model")
@model_options
@out_options
@handle_errors
def fit_cmd(config_path, data, unit, name, start, end, order, drift, method, out, formats):
    """Fit one ARIMA(p,d,q) model."""
    cfg = _settings(config_path, "fit", data=data, unit=unit, name=name, start=start, end=end,
                    order=order, drift=drift, method=method, out=out, formats=formats)
    series = _series(cfg)
    model = fit(series, cfg.arima_order, drift=bool(cfg.drift), method=cfg.method)
    _log_fit(series.name, model)

    body = _fit_markdown(model)
    emit = Emitter(cfg, series.name)
    emit.json("fit", model.to_dict())
    emit.markdown("fit", _document(f"{_model_label(model.order, model.drift)}: {series.name}",
                                   "Estimates", body, "arima_engine.fit"))
    click.echo(body)
    emit.report()


@cli.command()
@config_option
@data_options
@click.option("--p-max", type=int, default=None)
@click.option("--d-min", type=int, default=None)
@click.option("--d-max", type=int, default=None)
@click.option("--q-max", type=int, default=None)
@click.option("--drift-policy", default=None, help="none | always | auto")
@click.option("--workers", type=int, default=None, help="Threads (default $FORECAST_WORKERS or 1)")
@model_options
@out_options
@handle_errors
def grid(config_path, data, unit, name, start, end, p_max, d_min, d_max, q_max, drift_policy,
         workers, method, out, formats):
    """AIC / BIC over every order in the lattice."""
    cfg = _settings(config_path, "grid", data=data, unit=unit, name=name, start=start, end=end,
                    p_max=p_max, d_min=d_min, d_max=d_max, q_max=q_max, drift_policy=drift_policy,
                    workers=workers, method=method, out=out, formats=formats)
    series = _series(cfg)
    result = grid_search(series, p_max=cfg.p_max, d_max=cfg.d_max, q_max=cfg.q_max, d_min=cfg.d_min,
                         drift=cfg.drift_policy, method=cfg.method, workers=cfg.workers,
                         on_log=_verbose_log())
    for c in result.candidates:
        run_log_fit(series.name, c.order.as_tuple(), c.drift, cfg.method, c.loglik, c.aic, c.bic, c.status)

    body = grid_markdown(result)
    emit = Emitter(cfg, series.name)
    emit.csv("grid", result.to_csv)
    emit.json("grid", result.to_dict())
    emit.markdown("grid", _document(f"Order grid: {series.name}", "Information criteria", body,
                                    "arima_engine.grid_search"))
    click.echo(body)
    emit.report()


@cli.command()
@config_option
@data_options
@click.option("--p-max", type=int, default=None)
@click.option("--d-max", type=int, default=None)
@click.option("--q-max", type=int, default=None)
@model_options
@out_options
@handle_errors
def autofit(config_path, data, unit, name, start, end, p_max, d_max, q_max, method, out, formats):
    """Stepwise order selection (d by ADF, then p, q, drift by AIC)."""
    cfg = _settings(config_path, "autofit", data=data, unit=unit, name=name, start=start, end=end,
                    p_max=p_max, d_max=d_max, q_max=q_max, method=method, out=out, formats=formats)
    series = _series(cfg)
    result = stepwise_search(series, max_p=cfg.p_max, max_q=cfg.q_max, max_d=cfg.d_max,
                             method=cfg.method, on_log=_verbose_log())
    for c in result.visited:
        run_log_fit(series.name, c.order.as_tuple(), c.drift, cfg.method, c.loglik, c.aic, c.bic, c.status)

    visited = ["| ARIMA Model | AIC | BIC | Status |", "|---|---|---|---|"]
    visited.extend(f"| {_model_label(c.order, c.drift)} | {c.aic:.4f} | {c.bic:.4f} | {c.status} |"
                   for c in result.visited)
    body = (f"Selected: {_model_label(result.order, result.drift)}\n\n"
            + _fit_markdown(result.fit) + "\n\n" + "\n".join(visited))
    emit = Emitter(cfg, series.name)
    emit.json("autofit", {
        "order": list(result.order.as_tuple()),
        "drift": result.drift,
        "fit": result.fit.to_dict(),
        "visited": [{"order": list(c.order.as_tuple()), "drift": c.drift, "aic": c.aic,
                     "bic": c.bic, "status": c.status} for c in result.visited],
    })
    emit.markdown("autofit", _document(f"Stepwise selection: {series.name}", "Selected model", body,
                                       "arima_engine.stepwise_search"))
    click.echo(body)
    emit.report()


# ============================================================
# FORECAST
# ============================================================

def _horizon(cfg: RunConfig, series: AnnualSeries) -> int:
    if cfg.horizon is not None and cfg.end_year is not None:
        raise click.UsageError("give --horizon or --end-year, not both")
    if cfg.horizon is not None:
        return cfg.horizon
    if cfg.end_year is not None:
        return cfg.end_year - series.last_year
    raise click.UsageError("--horizon or --end-year is required")


def _emit_forecast(emit: Emitter, table: ForecastTable, history: AnnualSeries, suffix: str = "forecast",
                   doc: Optional[ReportDocument] = None) -> str:
    body = forecast_markdown(table)
    emit.csv(suffix, table.to_csv)
    emit.json(suffix, table.to_dict())
    emit.plot(suffix, table, "fanchart", history=history, doc=doc)
    return body


@cli.command(name="forecast")
@config_option
@data_options
@click.option("--order", default=None, help="p,d,q (omit for stepwise selection)")
@click.option("--drift/--no-drift", default=None,
              help="Constant in the differenced model; without --order the selected order is re-fitted with it")
@click.option("--horizon", type=int, default=None, help="Steps ahead")
@click.option("--end-year", type=int, default=None, help="Forecast through this year")
@click.option("--level", type=float, default=None, help="Interval level, 95 or 0.95")
@click.option("--variance", default=None, help="df | mle innovation variance for intervals")
@model_options
@out_options
@handle_errors
def forecast_cmd(config_path, data, unit, name, start, end, order, drift, horizon, end_year, level,
                 variance, method, out, formats):
    """Point forecasts with confidence intervals."""
    cfg = _settings(config_path, "forecast", data=data, unit=unit, name=name, start=start, end=end,
                    order=order, drift=drift, horizon=horizon, end_year=end_year, level=level,
                    variance=variance, method=method, out=out, formats=formats)
    series = _series(cfg)
    steps = _horizon(cfg, series)
    if cfg.order:
        model = fit(series, cfg.arima_order, drift=bool(cfg.drift), method=cfg.method)
    else:
        model = auto_fit(series, drift=cfg.drift, method=cfg.method, on_log=_verbose_log())
    _log_fit(series.name, model)
    table = forecast(model, steps, level=cfg.level, variance=cfg.variance)

    emit = Emitter(cfg, series.name)
    doc = ReportDocument(f"Forecast: {series.name}")
    body = _emit_forecast(emit, table, series, doc=doc)
    doc.add(_model_label(model.order, model.drift), _fit_markdown(model), "arima_engine.fit")
    doc.add("Forecast", body, "arima_engine.forecast")
    emit.markdown("forecast", doc)
    click.echo(body)
    emit.report()


# ============================================================
# SCENARIO
# ============================================================

@cli.command()
@click.option("--scenario", "scenario_path", type=click.Path(dir_okay=False), default=None,
              help="Scenario KEY=value file")
@click.option("--preset", type=click.Choice(["sub", "entire"]), default=None,
              help="Pinned GDP / exchange-rate scenario on the bundled data")
@click.option("--end-year", type=int, default=None)
@click.option("--workers", type=int, default=None, help="Indicators run in parallel")
@out_options
@handle_errors
def scenario(scenario_path, preset, end_year, workers, out, formats):
    """Forecast every indicator to the end year and derive GDP($), ratios and income bands."""
    if bool(scenario_path) == bool(preset):
        raise click.UsageError("give exactly one of --scenario or --preset")
    cfg = _settings(None, "scenario", end_year=end_year, workers=workers, out=out, formats=formats)
    if preset:
        config = pinned_scenario(DatasetCatalog.bundled(), preset)
    else:
        config = load_scenario(scenario_path)
    if end_year is not None:
        config = replace(config, end_year=end_year)

    report = run_scenario(config, workers=cfg.workers or 1, on_log=_verbose_log())
    for name, r in report.indicators.items():
        _log_fit(r.sample.name, r.fit)

    stem = preset or Path(scenario_path).stem
    emit = Emitter(cfg, stem)
    doc = ReportDocument(f"Scenario {stem}: {report.end_year}")
    body = scenario_markdown(report)
    doc.add("Derived outputs", body, "scenario.run_scenario")
    for name, r in report.indicators.items():
        doc.add(f"{name}: {_model_label(r.fit.order, r.fit.drift)}",
                _emit_forecast(emit, r.forecast, r.sample, suffix=f"{name}_forecast", doc=doc),
                "arima_engine.forecast")
    if report.gdp_usd is not None:
        emit.csv("gdp_usd", lambda path: save_csv(report.gdp_usd, path))
        emit.plot("gdp_usd", report.gdp_usd, "line", title="GDP ($ crore)", doc=doc)
    emit.json("scenario", report.to_dict())
    emit.markdown("scenario", doc)
    click.echo(body)
    emit.report()


# ============================================================
# REPRODUCTION
# ============================================================

def _reproduction_artifacts(cfg: RunConfig, catalog: DatasetCatalog) -> Emitter:
    fx = catalog.get("exchange_rate_1971_2024")
    gdp = catalog.get("gdp_rs_crore_1971_2025")
    emit = Emitter(cfg, "reproduction")
    doc = ReportDocument("Reproduction: India 2047 macro forecasts")

    # Exchange rate: unit roots, correlograms, forecast
    reports = []
    for d in (0, 1):
        target = difference(fx, d)
        target = replace(target, name="Exchange Rate" if d == 0 else "D.Exchange Rate")
        reports.append(adf_test(target))
        reports.append(pp_test(target))
    emit.csv("fx_unitroot", lambda path: unit_root_csv(reports, path))
    doc.add("Exchange rate: unit-root tests", unit_root_markdown(reports),
            "unit_root.adf_test / unit_root.pp_test")
    for d in (0, 1):
        corr = correlogram(difference(fx, d))
        emit.plot(f"fx_d{d}_correlogram", corr, "correlogram",
                  title=f"Exchange rate ({difference(fx, d).unit_label})", doc=doc)

    for label, sample in (("1971-2024", fx), ("1991-2024", fx.slice(1991, 2024))):
        model = fit(sample, ArimaOrder(0, 1, 0), drift=True)
        _log_fit(sample.name, model)
        table = forecast(model, 2047 - sample.last_year)
        suffix = f"fx_{sample.first_year}_forecast"
        doc.add(f"Exchange rate {label}: ARIMA(0, 1, 0) + drift",
                _emit_forecast(emit, table, sample, suffix=suffix, doc=doc), "arima_engine.forecast")

    # GDP sub-period: grid and forecast
    sample = gdp.slice(1991, 2025)
    result = grid_search(sample, p_max=1, d_max=2, q_max=1, drift="none", workers=cfg.workers,
                         on_log=_verbose_log())
    for c in result.candidates:
        run_log_fit(sample.name, c.order.as_tuple(), c.drift, "exact-mle", c.loglik, c.aic, c.bic, c.status)
    emit.csv("gdp_1991_grid", result.to_csv)
    doc.add("GDP 1991-2025: order grid", grid_markdown(result), "arima_engine.grid_search")

    # Scenarios: developed-status GDP($) from the published GNI per capita of each period
    for period, start, gni_key in (("entire", 1971, "gni_2047"), ("sub", 1991, "gni_sub_2047")):
        try:
            report = run_scenario(pinned_scenario(catalog, period, gni_end=PUBLISHED[gni_key]),
                                  on_log=_verbose_log())
        except ForecastError as e:
            run_log_error(f"{period} scenario: {e}")
            doc.add(f"GDP ($), {start}-2024 models", f"Not reproduced: {e}", "scenario.run_scenario")
            continue
        gdp_result = report.indicators["gdp"]
        doc.add(f"GDP {start}-2025: ARIMA(0, 2, 1)",
                _emit_forecast(emit, gdp_result.forecast, gdp_result.sample,
                               suffix=f"gdp_{start}_forecast", doc=doc),
                "arima_engine.forecast")
        emit.csv(f"gdp_usd_{start}", lambda path, s=report.gdp_usd: save_csv(s, path))
        emit.json(f"scenario_{period}", report.to_dict())
        doc.add(f"GDP ($), {start}-2024 models", scenario_markdown(report), "scenario.run_scenario")

    emit.markdown("report", doc)
    return emit


@cli.command(name="reproduce-paper")
@click.option("--out", default=None, help="Output directory (default: out)")
@click.option("--workers", type=int, default=None)
@click.pass_context
@handle_errors
def reproduce(ctx: click.Context, out, workers):
    """Regenerate the reproducible tables and figures, then run the pinned checks."""
    cfg = _settings(None, "reproduce-paper", out=out, workers=workers)
    catalog = DatasetCatalog.bundled()
    emit = _reproduction_artifacts(cfg, catalog)
    emit.report()

    result = run_verification(catalog, echo=click.echo, workers=cfg.workers or 1)
    if "json" in cfg.format_set:
        write_json([{"name": c.name, "passed": c.passed, "critical": c.critical, "details": c.details}
                    for c in result.checks], Path(cfg.out) / "reproduction_verification.json")
    if not result.passed:
        run_log_error("verification failed")
        ctx.exit(1)


# ============================================================
# ENTRY POINT
# ============================================================

def run_cli(argv: Optional[List[str]] = None) -> int:
    """Run one command; returns the exit status instead of exiting."""
    argv = list(sys.argv[1:] if argv is None else argv)
    init_run_logger(enabled=False)  # replaced by the group callback
    try:
        result = cli.main(args=argv, prog_name=PROG_NAME, standalone_mode=False, obj={"argv": argv})
    except click.ClickException as e:
        e.show()
        code = e.exit_code
    except click.exceptions.Abort:
        click.echo("Aborted!", err=True)
        code = 1
    else:
        code = result if isinstance(result, int) else 0
    run_log_stop(code)
    return code


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
