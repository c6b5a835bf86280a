"""
Plot Emission
=============
SVG figures: line charts of series, ACF/PACF stem charts with the white-noise
band, and forecast fan charts.

Figures are drawn on the Agg canvas without pyplot state, with a fixed SVG
hash salt and no date metadata, so identical input gives identical bytes.
"""

from pathlib import Path
from typing import Optional, Union

import matplotlib
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from ..core.arima_engine import ForecastTable
from ..core.errors import OutputError, ParameterError
from ..core.series_store import AnnualSeries
from ..core.stats_core import Correlogram

matplotlib.rcParams["svg.hashsalt"] = "forecast-toolkit"

PLOT_KINDS = ("line", "correlogram", "fanchart")

PlotData = Union[AnnualSeries, Correlogram, ForecastTable]


def _line(fig: Figure, series: AnnualSeries, title: str):
    ax = fig.add_subplot(1, 1, 1)
    ax.plot(series.years, series.values, color="tab:blue", marker="o", markersize=3, linewidth=1.2)
    ax.set_xlabel("Year")
    ax.set_ylabel(series.unit_label)
    ax.set_title(title or series.name)
    ax.grid(True, alpha=0.3)


def _stems(ax, lags, values, band: float, label: str):
    ax.vlines(lags, 0.0, values, color="tab:blue", linewidth=1.5)
    ax.plot(lags, values, "o", color="tab:blue", markersize=3)
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.axhspan(-band, band, color="tab:blue", alpha=0.15)
    ax.set_ylim(-1.05, 1.05)
    ax.set_ylabel(label)


def _correlogram(fig: Figure, corr: Correlogram, title: str):
    lags = list(range(1, corr.max_lag + 1))
    ax1 = fig.add_subplot(2, 1, 1)
    _stems(ax1, lags, corr.acf[1:], corr.band, "ACF")
    ax1.set_title(title or "Correlogram")
    ax2 = fig.add_subplot(2, 1, 2)
    _stems(ax2, lags, corr.pacf, corr.band, "PACF")
    ax2.set_xlabel("Lag")


def _fanchart(fig: Figure, table: ForecastTable, history: Optional[AnnualSeries], title: str):
    ax = fig.add_subplot(1, 1, 1)
    if history is not None:
        ax.plot(history.years, history.values, color="black", linewidth=1.2, label="Actual")
    years = table.years
    ax.fill_between(years, [r.lower for r in table.rows], [r.upper for r in table.rows],
                    color="tab:orange", alpha=0.25, label=f"{table.level * 100:g}% interval")
    ax.plot(years, table.points, color="tab:orange", marker="o", markersize=3, linewidth=1.2,
            label="Forecast")
    ax.set_xlabel("Year")
    ax.set_ylabel(table.unit)
    ax.set_title(title or f"{table.name} ARIMA{table.order}{' + drift' if table.drift else ''}")
    ax.legend(loc="best")
    ax.grid(True, alpha=0.3)


def emit_plot(data: PlotData, kind: str, path, title: str = "",
              history: Optional[AnnualSeries] = None) -> Path:
    """Write one SVG figure and return its path."""
    if kind not in PLOT_KINDS:
        raise ParameterError(f"unknown plot kind '{kind}' (expected {' | '.join(PLOT_KINDS)})")

    fig = Figure(figsize=(8, 6) if kind == "correlogram" else (8, 4.5))
    FigureCanvasAgg(fig)
    if kind == "line":
        if not isinstance(data, AnnualSeries):
            raise ParameterError("line plots take a series")
        _line(fig, data, title)
    elif kind == "correlogram":
        if not isinstance(data, Correlogram) or _empty_correlogram(data):
            raise ParameterError("correlogram plots take a non-empty correlogram")
        _correlogram(fig, data, title)
    else:
        if not isinstance(data, ForecastTable) or not data.rows:
            raise ParameterError("fan charts take a non-empty forecast table")
        _fanchart(fig, data, history, title)
    fig.tight_layout()

    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, format="svg", metadata={"Date": None})
    except OSError as e:
        raise OutputError(f"cannot write plot to {path}: {e}") from e
    return path


def _empty_correlogram(corr: Correlogram) -> bool:
    return corr.max_lag < 1 or not corr.pacf
