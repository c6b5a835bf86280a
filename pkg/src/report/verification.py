#!/usr/bin/env python3
"""
Reproduction Verification Suite
===============================
Pinned checks against the published tables, run on the bundled data.
`reproduce-paper` exits 0 only if every critical check passes.

Sections:
  [A] Exchange-rate ADF, level and first difference
  [B] Exchange-rate Phillips-Perron Z(rho) and Z(t)
  [C] Exchange-rate drift forecasts and 95% intervals
  [D] Dickey-Fuller critical values
  [E] GDP 1991-2025 grid and forecast
  [F] GDP($), debt ratio, income band, growth rates and developed-status GDP($)
  [G] Information-criteria identities
"""

import math
from dataclasses import dataclass, field
from datetime import datetime
from typing import Callable, List, Optional

from ..core.arima_engine import ArimaOrder, fit, forecast, grid_search
from ..core.errors import ForecastError
from ..core.scenario import (
    IncomeBand, cagr, classify_income, convert_currency, developed_gdp, pinned_scenario, ratio_series,
    required_growth, run_scenario,
)
from ..core.series_store import AnnualSeries, DatasetCatalog
from ..core.stats_core import difference
from ..core.unit_root import adf_test, critical_values, pp_test

# Published values
PUBLISHED = {
    "adf_fx_level": 1.567, "adf_fx_level_p": 0.9978,
    "adf_fx_diff": -6.363, "adf_fx_diff_p": 0.0,
    "pp_fx_level_rho": 1.159, "pp_fx_level_t": 1.393,
    "pp_fx_diff_rho": -48.942, "pp_fx_diff_t": -6.408,
    "fx_2025": 84.20917, "fx_2025_lower": 79.47523, "fx_2025_upper": 88.94311,
    "fx_2047": 115.4375, "fx_sub_2025": 84.75476,
    "cv_constant_53": (-3.576, -2.928, -2.599),
    "cv_trend_61": (-4.126, -3.489, -3.173),
    "gdp_sub_aic_020": 989.6011, "gdp_sub_aic_021": 984.4337, "gdp_sub_2047": 98002564.0,
    "gdp_entire_2047": 97797560.0, "gfd_2047": 2270014.0,
    "gdp_usd_2047": 847190.5157, "gdp_usd_sub_2047": 765728.6367,
    "gni_2024": 2663.0117, "gni_2047": 5492.2796, "gni_sub_2047": 5521.6278, "high_income_cap": 14005.0,
    "developed_gdp_usd_2047": 2160287.5375, "developed_gdp_usd_sub_2047": 1942186.2439,
    "gfd_aic_010": 1434.093, "gfd_bic_010": 1436.082,
    "gni_aic_010": 705.0937123, "gni_bic_010": 707.2045862,
}


# ============================================================
# CHECK FRAMEWORK
# ============================================================

@dataclass
class CheckResult:
    name: str
    passed: bool
    details: str = ""
    critical: bool = True  # critical checks decide the exit status


@dataclass
class VerificationReport:
    checks: List[CheckResult] = field(default_factory=list)
    logs: List[str] = field(default_factory=list)
    echo: Callable[[str], None] = print

    def section(self, title: str):
        self.echo("")
        self.echo(title)
        self.echo("-" * 40)

    def add(self, name: str, passed: bool, details: str = "", critical: bool = True):
        self.checks.append(CheckResult(name, passed, details, critical))
        status = "PASS" if passed else "FAIL"
        crit = "[CRITICAL]" if critical and not passed else ""
        self.echo(f"  [{status}] {name} {crit}".rstrip())
        if details:
            self.echo(f"         {details}")

    def log(self, msg: str):
        t = datetime.now().strftime("%H:%M:%S.%f")[:-3]
        self.logs.append(f"{t} {msg}")

    def close(self, name: str, value: float, expected: float, tol: float, critical: bool = True):
        ok = math.isfinite(value) and abs(value - expected) <= tol
        self.add(name, ok, f"got {value:.6f}, expected {expected} ± {tol}", critical)

    def close_rel(self, name: str, value: float, expected: float, rel: float, critical: bool = True):
        ok = math.isfinite(value) and abs(value - expected) <= rel * abs(expected)
        self.add(name, ok, f"got {value:.4f}, expected {expected} within {rel:.2%}", critical)

    def error(self, name: str, exc: Exception):
        self.add(name, False, f"{type(exc).__name__}: {exc}")

    @property
    def passed(self) -> bool:
        return not any(not c.passed and c.critical for c in self.checks)

    def summary(self) -> bool:
        total = len(self.checks)
        passed = sum(1 for c in self.checks if c.passed)
        critical_failed = sum(1 for c in self.checks if not c.passed and c.critical)

        self.echo("")
        self.echo("=" * 60)
        self.echo("  VERIFICATION SUMMARY")
        self.echo("=" * 60)
        self.echo(f"  Total checks:    {total}")
        self.echo(f"  Passed:          {passed}")
        self.echo(f"  Failed:          {total - passed}")
        self.echo(f"  Critical fails:  {critical_failed}")
        self.echo("")
        if critical_failed:
            self.echo("  [MISMATCH] reproduction differs from the published tables")
            for c in self.checks:
                if not c.passed and c.critical:
                    self.echo(f"    - {c.name}: {c.details}")
        else:
            self.echo("  [REPRODUCED] all critical checks passed")
        self.echo("=" * 60)
        return critical_failed == 0


# ============================================================
# [A] EXCHANGE-RATE ADF
# ============================================================

def check_A_exchange_rate_adf(report: VerificationReport, fx: AnnualSeries):
    report.section("[A] EXCHANGE-RATE ADF (constant, lags=0)")
    try:
        level = adf_test(fx, "constant", 0)
        diff = adf_test(difference(fx, 1), "constant", 0)
    except ForecastError as e:
        report.error("A: ADF on bundled exchange rate", e)
        return
    report.log(f"[ADF] level z={level.z_t:.4f} diff z={diff.z_t:.4f}")
    report.close("A1: level Z(t)", level.z_t, PUBLISHED["adf_fx_level"], 0.01)
    report.close("A2: level p-value", level.p_value, PUBLISHED["adf_fx_level_p"], 0.005)
    report.close("A3: first-difference Z(t)", diff.z_t, PUBLISHED["adf_fx_diff"], 0.01)
    report.close("A4: first-difference p-value", diff.p_value, PUBLISHED["adf_fx_diff_p"], 0.005)


# ============================================================
# [B] EXCHANGE-RATE PHILLIPS-PERRON
# ============================================================

def check_B_exchange_rate_pp(report: VerificationReport, fx: AnnualSeries):
    report.section("[B] EXCHANGE-RATE PHILLIPS-PERRON (constant, auto bandwidth)")
    try:
        level = pp_test(fx, "constant")
        diff = pp_test(difference(fx, 1), "constant")
    except ForecastError as e:
        report.error("B: PP on bundled exchange rate", e)
        return
    report.close("B1: level Z(rho)", level.z_rho, PUBLISHED["pp_fx_level_rho"], 0.02)
    report.close("B2: level Z(t)", level.z_t, PUBLISHED["pp_fx_level_t"], 0.02)
    report.close("B3: first-difference Z(rho)", diff.z_rho, PUBLISHED["pp_fx_diff_rho"], 0.1)
    report.close("B4: first-difference Z(t)", diff.z_t, PUBLISHED["pp_fx_diff_t"], 0.02)


# ============================================================
# [C] EXCHANGE-RATE FORECASTS
# ============================================================

def check_C_exchange_rate_forecast(report: VerificationReport, fx: AnnualSeries):
    report.section("[C] EXCHANGE-RATE FORECASTS, ARIMA(0,1,0)+drift")
    order = ArimaOrder(0, 1, 0)
    try:
        entire = forecast(fit(fx, order, drift=True), 2047 - fx.last_year)
        sub = forecast(fit(fx.slice(1991, 2024), order, drift=True), 1)
    except ForecastError as e:
        report.error("C: exchange-rate forecast", e)
        return
    row = entire.row_at(2025)
    report.close("C1: 2025 point (1971-2024)", row.point, PUBLISHED["fx_2025"], 0.001)
    report.close("C2: 2025 lower 95%", row.lower, PUBLISHED["fx_2025_lower"], 0.01)
    report.close("C3: 2025 upper 95%", row.upper, PUBLISHED["fx_2025_upper"], 0.01)
    report.close("C4: 2047 point", entire.point_at(2047), PUBLISHED["fx_2047"], 0.01)
    report.close("C5: 2025 point (1991-2024)", sub.point_at(2025), PUBLISHED["fx_sub_2025"], 0.001)


# ============================================================
# [D] CRITICAL VALUES
# ============================================================

def check_D_critical_values(report: VerificationReport):
    report.section("[D] DICKEY-FULLER CRITICAL VALUES")
    for label, det, n, key in (("constant, n=53", "constant", 53, "cv_constant_53"),
                               ("constant+trend, n=61", "constant+trend", 61, "cv_trend_61")):
        got = critical_values(det, n)
        for level, value, expected in zip(("1%", "5%", "10%"), got, PUBLISHED[key]):
            report.close(f"D: {label} {level}", value, expected, 0.01)


# ============================================================
# [E] GDP SUB-PERIOD PIPELINE
# ============================================================

def check_E_gdp_subperiod(report: VerificationReport, gdp: AnnualSeries, workers: int = 1):
    report.section("[E] GDP 1991-2025: GRID p,q<=1, d<=2, driftless")
    sample = gdp.slice(1991, 2025)
    try:
        grid = grid_search(sample, p_max=1, d_max=2, q_max=1, drift="none", workers=workers,
                           on_log=report.log)
    except ForecastError as e:
        report.error("E: GDP grid", e)
        return
    report.add("E1: best AIC order is (0, 2, 1)", grid.best_aic == ArimaOrder(0, 2, 1),
               f"best_aic={grid.best_aic}")
    report.close("E2: (0, 2, 0) AIC", grid.candidate(ArimaOrder(0, 2, 0)).aic, PUBLISHED["gdp_sub_aic_020"], 0.5)
    report.close("E3: (0, 2, 1) AIC", grid.candidate(ArimaOrder(0, 2, 1)).aic, PUBLISHED["gdp_sub_aic_021"], 2.0)
    try:
        table = forecast(fit(sample, ArimaOrder(0, 2, 1)), 2047 - sample.last_year)
    except ForecastError as e:
        report.error("E4: GDP forecast", e)
        return
    report.close_rel("E4: 2047 forecast", table.point_at(2047), PUBLISHED["gdp_sub_2047"], 0.005)


# ============================================================
# [F] SCENARIO DERIVATIONS
# ============================================================

def _point(year: int, value: float, name: str, unit: str) -> AnnualSeries:
    return AnnualSeries(name=name, unit=unit, first_year=year, values=(value,))


def check_F_scenario(report: VerificationReport, catalog: DatasetCatalog):
    report.section("[F] SCENARIO DERIVATIONS")
    gdp_2047 = _point(2047, PUBLISHED["gdp_entire_2047"], "gdp", "rupee-crore")
    fx_2047 = _point(2047, PUBLISHED["fx_2047"], "fx", "rupees-per-usd")
    gfd_2047 = _point(2047, PUBLISHED["gfd_2047"], "gfd", "rupee-crore")
    usd = convert_currency(gdp_2047, fx_2047).value_at(2047)
    report.close("F1: GDP($) 2047 from published forecasts", usd, PUBLISHED["gdp_usd_2047"], 0.5)
    ratio = ratio_series(gfd_2047, gdp_2047).value_at(2047)
    report.close("F2: GFD / GDP 2047 (percent)", ratio, 2.32, 0.01)
    band = classify_income(5492.28)
    report.add("F3: 5492.28 classifies as upper-middle", band is IncomeBand.UPPER_MIDDLE, f"band={band.value}")
    years = 2047 - 2024
    report.close("F4: forecast CAGR (percent)",
                 100 * cagr(PUBLISHED["gni_2024"], PUBLISHED["gni_2047"], years), 3.20, 0.05)
    report.close("F5: required CAGR (percent)",
                 100 * required_growth(PUBLISHED["gni_2024"], PUBLISHED["high_income_cap"], years), 7.48, 0.05)
    report.close_rel("F7: developed GDP($) 2047, 1971-2024 basis",
                     developed_gdp(PUBLISHED["high_income_cap"], PUBLISHED["gni_2047"], usd),
                     PUBLISHED["developed_gdp_usd_2047"], 1e-4)
    try:
        scenario = run_scenario(pinned_scenario(catalog, "sub", gni_end=PUBLISHED["gni_sub_2047"]),
                                on_log=report.log)
    except ForecastError as e:
        report.error("F6: pinned sub-period scenario", e)
        return
    report.close_rel("F6: GDP($) 2047, pinned sub-period scenario",
                     scenario.gdp_usd.value_at(2047), PUBLISHED["gdp_usd_sub_2047"], 0.005)
    (developed,) = scenario.annotations
    report.close_rel("F8: developed GDP($) 2047, 1991-2024 basis",
                     developed.value, PUBLISHED["developed_gdp_usd_sub_2047"], 0.005)


# ============================================================
# [G] INFORMATION CRITERIA
# ============================================================

def check_G_information_criteria(report: VerificationReport):
    report.section("[G] INFORMATION-CRITERIA IDENTITIES")
    gfd_gap = PUBLISHED["gfd_bic_010"] - PUBLISHED["gfd_aic_010"]
    gni_gap = PUBLISHED["gni_bic_010"] - PUBLISHED["gni_aic_010"]
    report.close("G1: BIC - AIC, k=1, n=54", math.log(54) - 2.0, gfd_gap, 0.001)
    report.close("G2: BIC - AIC, k=1, n=61", math.log(61) - 2.0, gni_gap, 0.01)


# ============================================================
# MAIN
# ============================================================

def run_verification(catalog: Optional[DatasetCatalog] = None,
                     echo: Callable[[str], None] = print,
                     workers: int = 1) -> VerificationReport:
    """Run every pinned check; the report's `passed` decides the exit status."""
    echo("")
    echo("=" * 60)
    echo("  REPRODUCTION VERIFICATION SUITE")
    echo("=" * 60)

    report = VerificationReport(echo=echo)
    catalog = catalog or DatasetCatalog.bundled()
    fx = catalog.get("exchange_rate_1971_2024")
    gdp = catalog.get("gdp_rs_crore_1971_2025")

    check_A_exchange_rate_adf(report, fx)
    check_B_exchange_rate_pp(report, fx)
    check_C_exchange_rate_forecast(report, fx)
    check_D_critical_values(report)
    check_E_gdp_subperiod(report, gdp, workers)
    check_F_scenario(report, catalog)
    check_G_information_criteria(report)

    report.summary()
    return report
