import pytest

from src.cli.config import (
    RunConfig, load_scenario, parse_bool, parse_scenario, parse_window, resolve_data, select_window,
)
from src.core.arima_engine import ArimaOrder
from src.core.errors import ConfigError, ForecastError
from src.core.series_store import save_csv

from conftest import make_series


# ============================================================
# RUN CONFIG
# ============================================================

def test_defaults():
    cfg = RunConfig()
    assert cfg.lag_spec == 0
    assert cfg.bandwidth_spec == "auto"
    assert cfg.drift is None
    assert cfg.format_set == ("csv", "json", "md", "svg")
    assert cfg.to_text() == ""


def test_parse_converts_types():
    cfg = RunConfig.parse(
        "# forecast run\n"
        "DATA=catalog:exchange_rate_1971_2024\n"
        "ORDER=0,1,0\n"
        "DRIFT=yes\n"
        "END_YEAR=2047\n"
        "LEVEL=90\n"
        "LAGS=aic\n"
    )
    assert cfg.drift is True
    assert cfg.end_year == 2047
    assert cfg.level == 90.0
    assert cfg.lag_spec == "aic"
    assert cfg.arima_order == ArimaOrder(0, 1, 0)


def test_text_round_trip():
    cfg = RunConfig(name="a b", level=90.0, drift=True, p_max=1, formats="csv,md")
    text = cfg.to_text()
    assert "NAME='a b'" in text
    assert "LEVEL=90.0" in text
    assert "DRIFT=true" in text
    assert RunConfig.parse(text) == cfg


def test_single_quote_cannot_be_written():
    with pytest.raises(ConfigError):
        RunConfig(name="it's").to_text()


@pytest.mark.parametrize("text", [
    "COLOUR=blue",
    "DRIFT=maybe",
    "P_MAX=three",
    "LAGS=-1",
    "BANDWIDTH=wide",
    "FORMATS=csv,pdf",
    "TEST=kpss",
    "DET=quadratic",
    "WORKERS=0",
    "ORDER",
])
def test_invalid_documents(text):
    with pytest.raises(ConfigError):
        RunConfig.parse(text + "\n")


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.load(tmp_path / "absent.env")


def test_load_from_file(tmp_path):
    path = tmp_path / "run.env"
    path.write_text("P_MAX=1\nQ_MAX=1\nDRIFT_POLICY=none\n", encoding="utf-8")
    cfg = RunConfig.load(path)
    assert (cfg.p_max, cfg.q_max, cfg.drift_policy) == (1, 1, "none")


def test_flags_override_file_values():
    cfg = RunConfig.parse("HORIZON=5\nLEVEL=80\n")
    merged = cfg.merged({"horizon": 10, "level": None})
    assert merged.horizon == 10
    assert merged.level == 80.0
    with pytest.raises(ConfigError):
        cfg.merged({"colour": "blue"})


def test_order_required():
    with pytest.raises(ConfigError):
        RunConfig().arima_order


def test_parse_bool():
    assert parse_bool("X", "On") is True
    assert parse_bool("X", "0") is False
    with pytest.raises(ConfigError):
        parse_bool("X", "2")


# ============================================================
# DATA RESOLUTION
# ============================================================

def test_resolve_catalog(catalog):
    series = resolve_data("catalog:exchange_rate_1971_2024", catalog=catalog, name="fx")
    assert series.name == "fx"
    assert series.value_at(2024) == 82.7897


def test_resolve_errors(catalog):
    with pytest.raises(ConfigError):
        resolve_data("", catalog=catalog)
    with pytest.raises(ConfigError):
        resolve_data("catalog:nope", catalog=catalog)
    with pytest.raises(ConfigError):
        resolve_data("catalog:exchange_rate_1971_2024", unit="usd", catalog=catalog)
    with pytest.raises(ConfigError):
        resolve_data("series.csv")


def test_resolve_csv(tmp_path):
    path = save_csv(make_series([1.0, 2.0, 3.0]), tmp_path / "s.csv")
    series = resolve_data(str(path), unit="usd")
    assert series.values == (1.0, 2.0, 3.0)
    assert series.provenance == "csv:s.csv"


def test_select_window():
    series = make_series(range(10), first_year=2000)
    assert select_window(series, None, None) is series
    assert select_window(series, 2005, None).first_year == 2005
    assert select_window(series, None, 2003).last_year == 2003


# ============================================================
# SCENARIO FILES
# ============================================================

def test_preset_scenario(catalog):
    scenario = parse_scenario("PRESET=sub\nEND_YEAR=2040\n", catalog)
    assert scenario.end_year == 2040
    assert scenario.gdp.window == (1991, 2025)
    assert scenario.fx.order == ArimaOrder(0, 1, 0)
    assert scenario.gni is None


def test_explicit_scenario(catalog, tmp_path):
    path = tmp_path / "scenario.env"
    path.write_text(
        "GDP_SOURCE=catalog:gdp_rs_crore_1971_2025\n"
        "GDP_WINDOW=1991-2025\n"
        "GDP_ORDER=0,2,1\n"
        "FX_SOURCE=catalog:exchange_rate_1971_2024\n"
        "FX_ORDER=auto\n"
        "FX_DRIFT=true\n"
        "LEVEL=90\n",
        encoding="utf-8",
    )
    scenario = load_scenario(path, catalog)
    assert scenario.gdp.order == ArimaOrder(0, 2, 1)
    assert scenario.fx.order is None
    assert scenario.fx.drift is True
    assert scenario.gdp.drift is None
    assert scenario.fx.window is None
    assert scenario.level == 90.0


@pytest.mark.parametrize("text", [
    "FX_ORDER=0,1,0\n",
    "GDP_SOURCE=catalog:gdp_rs_crore_1971_2025\nGDP_WINDOW=1991\n",
    "GDP_SOURCE=catalog:gdp_rs_crore_1971_2025\nGDP_DRIFT=sometimes\n",
    "HORIZON=5\n",
    "END_YEAR=soon\n",
])
def test_invalid_scenarios(catalog, text):
    with pytest.raises(ConfigError):
        parse_scenario(text, catalog)


def test_bad_preset_and_order(catalog):
    with pytest.raises(ForecastError):
        parse_scenario("PRESET=decade\n", catalog)
    with pytest.raises(ForecastError):
        parse_scenario("GDP_SOURCE=catalog:gdp_rs_crore_1971_2025\nGDP_ORDER=9,9,9\n", catalog)


def test_parse_window():
    assert parse_window("W", "1991-2025") == (1991, 2025)
    assert parse_window("W", " ") is None


def test_scenario_gni_end(catalog):
    scenario = parse_scenario("PRESET=sub\nGNI_END=5521.6278\n", catalog)
    assert scenario.gni_end == pytest.approx(5521.6278)
    assert parse_scenario("PRESET=sub\n", catalog).gni_end is None
    with pytest.raises(ConfigError):
        parse_scenario("PRESET=sub\nGNI_END=high\n", catalog)
