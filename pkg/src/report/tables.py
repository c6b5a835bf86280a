"""
Report Tables
=============
CSV / JSON / Markdown rendering of unit-root reports, grids, forecasts and
scenarios, and the ReportDocument that assembles them.

CSV keeps full precision (repr); Markdown shows 4 decimals.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

from ..core.arima_engine import ForecastTable, GridResult
from ..core.scenario import ScenarioReport
from ..core.stats_core import Correlogram
from ..core.unit_root import SIGNIFICANCE_NOTE, UnitRootReport


def fmt4(value: Optional[float]) -> str:
    if value is None:
        return ""
    if not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    return f"{value:.4f}"


def _markdown_table(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines.extend("| " + " | ".join(row) + " |" for row in rows)
    return "\n".join(lines)


def _clean(obj):
    """JSON has no NaN / inf; they become null."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def write_json(data, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_clean(data), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def write_text(text: str, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
    return path


# ============================================================
# UNIT ROOT
# ============================================================

def unit_root_csv(reports: Sequence[UnitRootReport], path) -> Path:
    lines = ["variable,test,deterministic,lags_or_bandwidth,nobs,z_t,z_rho,p_value,cv1,cv5,cv10"]
    for r in reports:
        z_rho = "" if r.z_rho is None else repr(r.z_rho)
        cv1, cv5, cv10 = (repr(v) for v in r.critical)
        lines.append(f"{r.variable},{r.test},{r.deterministic},{r.lags_or_bandwidth},{r.nobs},"
                     f"{r.z_t!r},{z_rho},{r.p_value!r},{cv1},{cv5},{cv10}")
    return write_text("\n".join(lines), path)


def unit_root_markdown(reports: Sequence[UnitRootReport], title: str = "") -> str:
    """Variable, statistic, p-value and the three critical values.

    PP reports get a Z(rho) row with its own critical values.
    """
    header = ["Variable", "Statistic", "Value", "P-Value",
              "1 % Critical Value", "5 % Critical Value", "10 % Critical Value"]
    rows = []
    for r in reports:
        cv1, cv5, cv10 = (f"{v:.3f}" for v in r.critical)
        rows.append([r.variable, "Z(t)", f"{r.z_t:.3f}{r.stars}", f"{r.p_value:.4f}", cv1, cv5, cv10])
        if r.z_rho is not None and r.critical_rho is not None:
            rho1, rho5, rho10 = (f"{v:.3f}" for v in r.critical_rho)
            rows.append([r.variable, "Z(rho)", f"{r.z_rho:.3f}", "", rho1, rho5, rho10])
    parts = [f"### {title}", ""] if title else []
    parts.append(_markdown_table(header, rows))
    parts.extend(["", SIGNIFICANCE_NOTE])
    return "\n".join(parts)


# ============================================================
# GRID / FORECAST / CORRELOGRAM
# ============================================================

def grid_markdown(grid: GridResult, title: str = "") -> str:
    rows = [[str(c.order) + (" +drift" if c.drift else ""), fmt4(c.aic), fmt4(c.bic), c.status]
            for c in grid.candidates]
    parts = [f"### {title}", ""] if title else []
    parts.append(_markdown_table(["ARIMA Model", "AIC", "BIC", "Status"], rows))
    parts.extend(["", f"Best by AIC: {grid.best_aic}; best by BIC: {grid.best_bic}"])
    return "\n".join(parts)


def forecast_markdown(table: ForecastTable, title: str = "") -> str:
    pct = f"{table.level * 100:g}"
    rows = [[str(r.year), fmt4(r.point), fmt4(r.lower), fmt4(r.upper)] for r in table.rows]
    parts = [f"### {title}", ""] if title else []
    parts.append(_markdown_table(["Year", "Forecast", f"Lower_{pct}", f"Upper_{pct}"], rows))
    if table.degenerate:
        parts.extend(["", "Degenerate fit (σ² = 0): intervals collapse to the point forecast."])
    return "\n".join(parts)


def correlogram_markdown(corr: Correlogram, title: str = "") -> str:
    rows = [[str(k), fmt4(a), fmt4(p)] for k, a, p, _ in corr.rows()]
    parts = [f"### {title}", ""] if title else []
    parts.append(_markdown_table(["Lag", "ACF", "PACF"], rows))
    parts.extend(["", f"95% white-noise band: ±{corr.band:.4f} (n = {corr.n})"])
    return "\n".join(parts)


# ============================================================
# SCENARIO
# ============================================================

def scenario_markdown(report: ScenarioReport, title: str = "") -> str:
    """Year, GDP, Exchange Rate, GDP in $ plus the derived findings."""
    parts = [f"### {title}", ""] if title else []
    if report.gdp_usd is not None:
        gdp = report.indicators["gdp"].extended
        fx = report.indicators["fx"].extended
        rows = [[str(year), fmt4(gdp.value_at(year)), fmt4(fx.value_at(year)), fmt4(usd)]
                for year, usd in report.gdp_usd]
        parts.append(_markdown_table(["Year", "GDP (Rs. Crores)", "Exchange Rate", "GDP in $"], rows))
        parts.append("")

    findings = []
    if report.gfd_ratio is not None and report.gfd_ratio.last_year >= report.end_year:
        findings.append(f"GFD / GDP {report.end_year}: {report.gfd_ratio.value_at(report.end_year):.2f}%")
    if report.gni_end is not None:
        findings.append(f"GNI per capita {report.end_year}: {report.gni_end:.4f} ({report.band_end.value})")
    if report.forecast_cagr is not None:
        findings.append(f"Forecast CAGR: {100 * report.forecast_cagr:.2f}%")
    if report.required_cagr is not None:
        findings.append(f"Required CAGR: {100 * report.required_cagr:.2f}%")
    for a in report.annotations:
        findings.append(f"{a.label}: {a.value:.4f} (computed as {a.formula})")
    for name, r in report.indicators.items():
        findings.append(f"{name}: {r.sample.first_year}-{r.sample.last_year}, "
                        f"ARIMA{r.fit.order}{'+drift' if r.fit.drift else ''} ({r.selected})")
    parts.extend(f"- {line}" for line in findings)
    return "\n".join(parts)


# ============================================================
# DOCUMENT
# ============================================================

@dataclass
class ReportSection:
    title: str
    body: str
    source: str  # library operation that produced the numbers


@dataclass
class ReportDocument:
    title: str
    sections: List[ReportSection] = field(default_factory=list)
    plots: List[str] = field(default_factory=list)

    def add(self, title: str, body: str, source: str):
        self.sections.append(ReportSection(title, body, source))

    def add_plot(self, path):
        self.plots.append(Path(path).name)

    def to_markdown(self) -> str:
        lines = [f"# {self.title}", ""]
        for s in self.sections:
            lines.extend([f"## {s.title}", "", f"_Source: `{s.source}`_", "", s.body, ""])
        if self.plots:
            lines.extend(["## Figures", ""])
            lines.extend(f"- ![{name}]({name})" for name in self.plots)
            lines.append("")
        return "\n".join(lines)

    def write(self, path) -> Path:
        return write_text(self.to_markdown(), path)
