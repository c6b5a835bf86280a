import json
import math

from src.core.arima_engine import ArimaOrder, fit, forecast, grid_search
from src.core.scenario import pinned_scenario, run_scenario
from src.core.stats_core import correlogram, difference
from src.core.unit_root import SIGNIFICANCE_NOTE, adf_test, pp_test
from src.report.tables import (
    ReportDocument, correlogram_markdown, fmt4, forecast_markdown, grid_markdown,
    scenario_markdown, unit_root_csv, unit_root_markdown, write_json,
)

from conftest import make_series


def test_fmt4():
    assert fmt4(1.23456) == "1.2346"
    assert fmt4(None) == ""
    assert fmt4(math.inf) == "inf"
    assert fmt4(-math.inf) == "-inf"
    assert fmt4(math.nan) == "nan"


def test_json_replaces_non_finite(tmp_path):
    path = write_json({"aic": -math.inf, "rows": [1.0, math.nan]}, tmp_path / "x.json")
    assert json.loads(path.read_text(encoding="utf-8")) == {"aic": None, "rows": [1.0, None]}


def test_unit_root_tables(fx, tmp_path):
    reports = [adf_test(fx), pp_test(difference(fx, 1))]
    text = unit_root_markdown(reports, title="Exchange rate")
    assert text.startswith("### Exchange rate")
    assert "| 1 % Critical Value |" in text.splitlines()[2]
    assert "Z(rho)" in text
    assert text.rstrip().endswith(SIGNIFICANCE_NOTE)

    lines = unit_root_csv(reports, tmp_path / "u.csv").read_text(encoding="utf-8").splitlines()
    assert len(lines) == 3
    assert lines[1].split(",")[1] == "ADF"
    assert lines[1].split(",")[6] == ""


def test_forecast_markdown(fx):
    table = forecast(fit(fx, ArimaOrder(0, 1, 0), drift=True), 2)
    text = forecast_markdown(table)
    assert "| Year | Forecast | Lower_95 | Upper_95 |" in text
    assert "| 2025 | 84.2092 |" in text


def test_degenerate_forecast_note():
    table = forecast(fit(make_series(range(20)), ArimaOrder(0, 1, 0), drift=True), 2)
    assert "Degenerate fit" in forecast_markdown(table)


def test_grid_and_correlogram_markdown(fx):
    grid = grid_search(fx, p_max=1, d_min=1, d_max=1, q_max=0)
    assert "Best by AIC:" in grid_markdown(grid)
    text = correlogram_markdown(correlogram(fx, 5))
    assert "| 5 |" in text
    assert "white-noise band" in text


def test_scenario_markdown(catalog):
    report = run_scenario(pinned_scenario(catalog, "sub", end_year=2030))
    text = scenario_markdown(report, title="Scenario")
    assert "| Year | GDP (Rs. Crores) | Exchange Rate | GDP in $ |" in text
    assert "| 2030 |" in text
    assert "- gdp: 1991-2025, ARIMA(0, 2, 1) (override)" in text


def test_report_document(tmp_path):
    doc = ReportDocument(title="Run")
    doc.add("Section", "body", "adf_test")
    doc.add_plot(tmp_path / "figure.svg")
    text = doc.write(tmp_path / "r.md").read_text(encoding="utf-8")
    assert text.startswith("# Run\n")
    assert "_Source: `adf_test`_" in text
    assert "![figure.svg](figure.svg)" in text
