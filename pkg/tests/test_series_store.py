from dataclasses import replace

import numpy as np
import pytest
import requests

from src.core import series_store
from src.core.errors import (
    ConfigError, FetchError, PayloadError, SeriesFormatError, SpanError, YearGapError,
)
from src.core.series_store import (
    AnnualSeries, IndicatorClient, fetch_indicator, load_csv, rows_to_series, save_csv, slice_series,
)

from conftest import make_series


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


# ============================================================
# BUNDLED CATALOG
# ============================================================

def test_bundled_catalog_spans(catalog, fx, gdp):
    assert catalog.keys() == ["exchange_rate_1971_2024", "gdp_rs_crore_1971_2025", "gdp_rs_crore_1991_2025"]
    assert (fx.first_year, fx.last_year, len(fx)) == (1971, 2024, 54)
    assert (gdp.first_year, gdp.last_year) == (1971, 2025)
    assert fx.unit == "rupees-per-usd"
    assert gdp.unit == "rupee-crore"
    assert fx.value_at(2024) == pytest.approx(82.7897)


def test_sub_period_file_matches_slice(catalog, gdp):
    sub = catalog.get("gdp_rs_crore_1991_2025")
    assert sub.values == gdp.slice(1991, 2025).values


def test_catalog_citation_and_unknown_key(catalog):
    assert "1970-2024" in catalog.citation("exchange_rate_1971_2024")
    with pytest.raises(ConfigError):
        catalog.get("gni_per_capita")


# ============================================================
# SERIES
# ============================================================

def test_series_rejects_unknown_unit():
    with pytest.raises(SeriesFormatError):
        AnnualSeries("x", "euro", 2000, (1.0,))


def test_series_rejects_non_finite_values():
    with pytest.raises(SeriesFormatError):
        make_series([1.0, float("nan")])


def test_value_at_outside_span():
    s = make_series([1, 2, 3])
    assert s.value_at(2002) == 3.0
    with pytest.raises(SpanError):
        s.value_at(2003)


def test_slice_inclusive_and_bounds():
    s = make_series(range(10))
    part = slice_series(s, 2003, 2005)
    assert part.years == [2003, 2004, 2005]
    assert part.values == (3.0, 4.0, 5.0)
    with pytest.raises(SpanError):
        s.slice(1999, 2002)
    with pytest.raises(SpanError):
        s.slice(2005, 2003)


def test_slice_length_property():
    rng = np.random.default_rng(41)
    for _ in range(50):
        n = int(rng.integers(1, 60))
        s = make_series(rng.standard_normal(n), first_year=int(rng.integers(1900, 2000)))
        a = s.first_year + int(rng.integers(0, n))
        b = int(rng.integers(a, s.last_year + 1))
        part = slice_series(s, a, b)
        assert len(part) == b - a + 1
        assert part.values == s.values[a - s.first_year:b - s.first_year + 1]


# ============================================================
# CSV
# ============================================================

def test_save_and_load_csv(tmp_path):
    s = make_series([1.5, 2.25, 1e-7], first_year=1990)
    path = save_csv(s, tmp_path / "s.csv")
    assert path.read_text(encoding="utf-8").splitlines()[0] == "year,value"
    back = load_csv(path, "usd")
    assert back.values == s.values
    assert back.first_year == 1990
    assert back.provenance == "csv:s.csv"


def test_csv_round_trip_property(tmp_path):
    rng = np.random.default_rng(43)
    for i in range(30):
        n = int(rng.integers(1, 80))
        values = rng.standard_normal(n) * 10.0 ** rng.integers(-6, 9, size=n)
        s = make_series(values, first_year=int(rng.integers(1800, 2020)), name=f"s{i}")
        back = load_csv(save_csv(s, tmp_path / f"s{i}.csv"), "usd")
        assert replace(back, provenance="") == s


def test_load_csv_bad_header(tmp_path):
    path = _write(tmp_path / "a.csv", "yr,val\n2000,1\n")
    with pytest.raises(SeriesFormatError) as exc:
        load_csv(path, "usd")
    assert exc.value.row == 1


def test_load_csv_year_gap(tmp_path):
    path = _write(tmp_path / "a.csv", "year,value\n2000,1\n2001,2\n2003,4\n")
    with pytest.raises(YearGapError) as exc:
        load_csv(path, "usd")
    assert exc.value.missing_year == 2002
    assert exc.value.row == 4


def test_load_csv_non_numeric_value_names_row(tmp_path):
    path = _write(tmp_path / "a.csv", "year,value\n2000,1\n2001,abc\n")
    with pytest.raises(SeriesFormatError) as exc:
        load_csv(path, "usd")
    assert exc.value.row == 3


def test_load_csv_descending_years(tmp_path):
    path = _write(tmp_path / "a.csv", "year,value\n2001,1\n2000,2\n")
    with pytest.raises(SeriesFormatError):
        load_csv(path, "usd")


def test_load_csv_missing_file(tmp_path):
    with pytest.raises(SeriesFormatError):
        load_csv(tmp_path / "nope.csv", "usd")


# ============================================================
# INDICATOR API
# ============================================================

class FakeResponse:
    def __init__(self, payload, status: int = 200):
        self.payload = payload
        self.status = status

    def raise_for_status(self):
        if self.status >= 400:
            raise requests.HTTPError(f"{self.status} error")

    def json(self):
        if isinstance(self.payload, Exception):
            raise self.payload
        return self.payload


def _worldbank_payload():
    rows = [{"date": "2024", "value": None}, {"date": "2023", "value": 2540.0},
            {"date": "2022", "value": 2380.5}, {"date": "2021", "value": 2150.0},
            {"date": "2020", "value": None}]
    return [{"page": 1, "pages": 1}, rows]


def test_fetch_worldbank_trims_null_ends(monkeypatch):
    calls = []

    def fake_get(url, timeout):
        calls.append(url)
        return FakeResponse(_worldbank_payload())

    monkeypatch.setattr(series_store.requests, "get", fake_get)
    logs = []
    s = fetch_indicator("worldbank-atlas", "NY.GNP.PCAP.CD", "IND", on_log=logs.append)
    assert (s.first_year, s.last_year) == (2021, 2023)
    assert s.values == (2150.0, 2380.5, 2540.0)
    assert s.unit == "usd-per-capita"
    assert "country/IND/indicator/NY.GNP.PCAP.CD" in calls[0]
    assert "NY.GNP.PCAP.CD/IND" in s.provenance
    assert any(line.startswith("[FETCH]") for line in logs)


def test_fetch_network_failure(monkeypatch):
    def fake_get(url, timeout):
        raise requests.ConnectionError("unreachable")

    monkeypatch.setattr(series_store.requests, "get", fake_get)
    with pytest.raises(FetchError):
        fetch_indicator("worldbank-atlas", "NY.GNP.PCAP.CD", "IND")


def test_fetch_http_error(monkeypatch):
    monkeypatch.setattr(series_store.requests, "get", lambda url, timeout: FakeResponse([], status=500))
    with pytest.raises(FetchError):
        fetch_indicator("worldbank-atlas", "NY.GNP.PCAP.CD", "IND")


def test_fetch_worldbank_error_payload(monkeypatch):
    payload = [{"message": [{"id": "120", "value": "Invalid value"}]}]
    monkeypatch.setattr(series_store.requests, "get", lambda url, timeout: FakeResponse(payload))
    with pytest.raises(PayloadError):
        fetch_indicator("worldbank-atlas", "BAD.CODE", "IND")


def test_fetch_generic_json(monkeypatch):
    payload = [{"year": 2001, "value": 2.0}, {"year": 2000, "value": 1.0}]
    monkeypatch.setattr(series_store.requests, "get", lambda url, timeout: FakeResponse(payload))
    s = fetch_indicator("generic-json", "gfd", "IND", endpoint="https://example.test/gfd",
                        unit="rupee-crore", client=IndicatorClient())
    assert s.values == (1.0, 2.0)


def test_generic_json_needs_endpoint():
    with pytest.raises(PayloadError):
        fetch_indicator("generic-json", "gfd", "IND")


def test_rows_to_series_interior_gap():
    with pytest.raises(PayloadError):
        rows_to_series([(2000, 1.0), (2001, None), (2002, 3.0)], "x", "usd", "test")
    with pytest.raises(PayloadError):
        rows_to_series([(2000, 1.0), (2002, 3.0)], "x", "usd", "test")


def test_rows_to_series_all_null():
    with pytest.raises(PayloadError):
        rows_to_series([(2000, None)], "x", "usd", "test")
