#!/usr/bin/env python3
"""
Unit Root Tests
===============
Augmented Dickey-Fuller and Phillips-Perron tests, Dickey-Fuller critical
values and MacKinnon approximate p-values, and the integration-order search.

Conventions (zero-lag, dfuller/pperron style):
  ADF:  Δy_t = [a] + [b·t] + γ·y_{t-1} + Σ δ_i Δy_{t-i} + e_t,   Z(t) = γ̂ / se(γ̂)
  PP:   same regression with no lagged differences, then
        Z(rho) = n·γ̂ - ½ (n²·se²/s²)(λ² - γ_0)
        Z(t)   = √(γ_0/λ²)·Z - ½ (λ² - γ_0)/λ · (n·se/s)
        λ² = Newey-West long-run variance of the residuals (Bartlett kernel)

Critical values:
  table    linear interpolation in n of the Fuller (1976) tables (default)
  surface  MacKinnon (2010) response surface, τ statistic only
"""

import math
from dataclasses import asdict, dataclass, field
from typing import Dict, Optional, Tuple, Union

import numpy as np
from scipy.stats import norm

from .errors import (
    DegenerateSeriesError, InsufficientDataError, NonStationaryError,
    ParameterError, ZeroVarianceError,
)
from .series_store import AnnualSeries
from .stats_core import RegressionFit, difference, newey_west_lrv, ols

# ============================================================
# CONFIGURATION
# ============================================================

DETERMINISTIC = ("none", "constant", "constant+trend")
_ALIASES = {
    "n": "none", "nc": "none", "noconstant": "none",
    "c": "constant", "const": "constant", "drift": "constant",
    "ct": "constant+trend", "trend": "constant+trend",
}

LEVELS = ("1%", "5%", "10%")

SIGNIFICANCE_NOTE = "Note: *p<0.01, **p<0.05, ***p < 0.001"

# Fuller (1976) table rows: sample sizes and (1%, 5%, 10%) quantiles
_TABLE_N = (25, 50, 100, 250, 500, math.inf)

FULLER_TAU = {
    "none": ((-2.66, -1.95, -1.60), (-2.62, -1.95, -1.61), (-2.60, -1.95, -1.61),
             (-2.58, -1.95, -1.62), (-2.58, -1.95, -1.62), (-2.58, -1.95, -1.62)),
    "constant": ((-3.75, -3.00, -2.63), (-3.58, -2.93, -2.60), (-3.51, -2.89, -2.58),
                 (-3.46, -2.88, -2.57), (-3.44, -2.87, -2.57), (-3.43, -2.86, -2.57)),
    "constant+trend": ((-4.38, -3.60, -3.24), (-4.15, -3.50, -3.18), (-4.04, -3.45, -3.15),
                       (-3.99, -3.43, -3.13), (-3.98, -3.42, -3.13), (-3.96, -3.41, -3.12)),
}

FULLER_RHO = {
    "none": ((-11.9, -7.3, -5.3), (-12.9, -7.7, -5.5), (-13.3, -7.9, -5.6),
             (-13.6, -8.0, -5.7), (-13.7, -8.0, -5.7), (-13.8, -8.1, -5.7)),
    "constant": ((-17.2, -12.5, -10.2), (-18.9, -13.3, -10.7), (-19.8, -13.7, -11.0),
                 (-20.3, -14.0, -11.2), (-20.5, -14.0, -11.2), (-20.7, -14.1, -11.3)),
    "constant+trend": ((-22.5, -17.9, -15.6), (-25.7, -19.8, -16.8), (-27.4, -20.7, -17.5),
                       (-28.4, -21.3, -18.0), (-28.9, -21.5, -18.1), (-29.5, -21.8, -18.3)),
}

# MacKinnon (2010) response surface, one unit root: cv = b0 + b1/n + b2/n² + b3/n³
TAU_SURFACE = {
    "none": ((-2.56574, -2.2358, -3.627, 0.0),
             (-1.94100, -0.2686, -3.365, 31.223),
             (-1.61682, 0.2656, -2.714, 25.364)),
    "constant": ((-3.43035, -6.5393, -16.786, -79.433),
                 (-2.86154, -2.8903, -4.234, -40.040),
                 (-2.56677, -1.5384, -2.809, 0.0)),
    "constant+trend": ((-3.95877, -9.0531, -28.428, -134.155),
                       (-3.41049, -4.3904, -9.036, -45.374),
                       (-3.12705, -2.5856, -3.925, -22.380)),
}

# MacKinnon (1994) p-value polynomials for τ, one unit root: p = Φ(poly(stat))
_TAU_STAR = {"none": -1.04, "constant": -1.61, "constant+trend": -2.89}
_TAU_MIN = {"none": -19.04, "constant": -18.83, "constant+trend": -16.18}
_TAU_MAX = {"none": math.inf, "constant": 2.74, "constant+trend": 0.7}
_TAU_SMALLP = {
    "none": (0.6344, 1.2378, 3.2496e-2),
    "constant": (2.1659, 1.4412, 3.8269e-2),
    "constant+trend": (3.2512, 1.6047, 4.9588e-2),
}
_TAU_LARGEP = {
    "none": (0.4797, 0.93557, -0.06999, 0.033066),
    "constant": (1.7339, 0.93202, -0.12745, -0.010368),
    "constant+trend": (2.5261, 0.61654, -0.37956, -0.060285),
}


def normalize_deterministic(deterministic: str) -> str:
    key = deterministic.strip().lower()
    key = _ALIASES.get(key, key)
    if key not in DETERMINISTIC:
        raise ParameterError(
            f"deterministic spec '{deterministic}' not understood (expected {' | '.join(DETERMINISTIC)})"
        )
    return key


def normalize_level(level: Union[str, float, int]) -> str:
    """Accepts '5%', 0.05 or 5."""
    if isinstance(level, str):
        text = level.strip().rstrip("%")
        try:
            value = float(text)
        except ValueError:
            raise ParameterError(f"unsupported significance level '{level}'") from None
    else:
        value = float(level)
    if value < 1.0:
        value *= 100.0
    for name in LEVELS:
        if abs(value - float(name.rstrip("%"))) < 1e-9:
            return name
    raise ParameterError(f"unsupported significance level {level!r} (expected 1%, 5% or 10%)")


# ============================================================
# CRITICAL VALUES AND P-VALUES
# ============================================================

def _interpolate_table(rows, n: float) -> Tuple[float, float, float]:
    if n <= _TABLE_N[0]:
        return rows[0]
    if n >= _TABLE_N[-2]:
        # linear in 1/n between n = 500 and the asymptotic row
        w = _TABLE_N[-2] / n
        return tuple(inf + (r500 - inf) * w for r500, inf in zip(rows[-2], rows[-1]))
    for i in range(len(_TABLE_N) - 2):
        lo, hi = _TABLE_N[i], _TABLE_N[i + 1]
        if lo <= n <= hi:
            w = (n - lo) / (hi - lo)
            return tuple(a + (b - a) * w for a, b in zip(rows[i], rows[i + 1]))
    raise AssertionError("unreachable")


def critical_values(
    deterministic: str,
    n: int,
    source: str = "table",
    statistic: str = "tau",
) -> Tuple[float, float, float]:
    """(cv1, cv5, cv10) for the τ or normalised-bias (rho) statistic."""
    det = normalize_deterministic(deterministic)
    if n < 20:
        raise InsufficientDataError(f"critical values need n >= 20, got {n}")
    if statistic not in ("tau", "rho"):
        raise ParameterError(f"statistic must be 'tau' or 'rho', got '{statistic}'")

    if source == "table":
        table = FULLER_TAU if statistic == "tau" else FULLER_RHO
        return _interpolate_table(table[det], float(n))
    if source == "surface":
        if statistic != "tau":
            raise ParameterError("response-surface critical values exist for the tau statistic only")
        return tuple(
            b0 + b1 / n + b2 / n ** 2 + b3 / n ** 3
            for b0, b1, b2, b3 in TAU_SURFACE[det]
        )
    raise ParameterError(f"critical-value source must be 'table' or 'surface', got '{source}'")


def mackinnon_critical(
    deterministic: str,
    n: int,
    level: Union[str, float, int],
    source: str = "table",
    statistic: str = "tau",
) -> float:
    """Finite-sample Dickey-Fuller critical value at one level."""
    name = normalize_level(level)
    return critical_values(deterministic, n, source, statistic)[LEVELS.index(name)]


def mackinnon_pvalue(stat: float, deterministic: str) -> float:
    """MacKinnon (1994) approximate p-value for the τ statistic."""
    det = normalize_deterministic(deterministic)
    if stat > _TAU_MAX[det]:
        return 1.0
    if stat < _TAU_MIN[det]:
        return 0.0
    coef = _TAU_SMALLP[det] if stat <= _TAU_STAR[det] else _TAU_LARGEP[det]
    x = sum(c * stat ** i for i, c in enumerate(coef))
    return float(min(max(norm.cdf(x), 0.0), 1.0))


def significance_stars(p_value: float) -> str:
    """Stars exactly as the table note reads: *p<0.01, **p<0.05, ***p < 0.001."""
    if p_value < 0.001:
        return "***"
    if p_value < 0.01:
        return "*"
    if p_value < 0.05:
        return "**"
    return ""


# ============================================================
# REPORT
# ============================================================

@dataclass(frozen=True)
class UnitRootReport:
    variable: str
    test: str                 # "ADF" | "PP"
    deterministic: str
    lags_or_bandwidth: int
    nobs: int
    z_t: float
    p_value: float
    critical: Tuple[float, float, float]
    z_rho: Optional[float] = None
    critical_rho: Optional[Tuple[float, float, float]] = None
    critical_source: str = "table"
    reject_at: Dict[str, bool] = field(default_factory=dict)

    def __post_init__(self):
        flags = {name: bool(self.z_t < cv) for name, cv in zip(LEVELS, self.critical)}
        object.__setattr__(self, "reject_at", flags)

    def rejects(self, level: Union[str, float, int] = "5%") -> bool:
        return self.reject_at[normalize_level(level)]

    @property
    def stars(self) -> str:
        return significance_stars(self.p_value)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["critical"] = list(self.critical)
        if self.critical_rho is not None:
            data["critical_rho"] = list(self.critical_rho)
        return data


# ============================================================
# REGRESSIONS
# ============================================================

def _check_series(y: np.ndarray, name: str):
    if y.size < 3:
        raise InsufficientDataError(f"{name}: unit-root test needs at least 3 values, got {y.size}")
    if float(np.ptp(y)) == 0.0:
        raise ZeroVarianceError(f"{name}: series is constant")


def _df_regression(y: np.ndarray, det: str, lags: int, start: int = 0) -> RegressionFit:
    """Δy_t on y_{t-1}, Δy_{t-1..t-lags}, deterministic terms (y_{t-1} first).

    `start` drops extra leading rows so lag searches share one sample.
    """
    dy = np.diff(y)
    first = max(lags, start)
    rows = dy.size - first
    columns = [y[first:-1]]
    for i in range(1, lags + 1):
        columns.append(dy[first - i: dy.size - i])
    if det in ("constant", "constant+trend"):
        columns.append(np.ones(rows))
    if det == "constant+trend":
        columns.append(np.arange(1, rows + 1, dtype=float))
    k = len(columns)
    if rows < k + 2:
        raise InsufficientDataError(
            f"effective sample {rows} too small for {k} regressors (need {k + 2})"
        )
    return ols(np.column_stack(columns), dy[first:])


def _gamma_and_se(fit: RegressionFit, name: str) -> Tuple[float, float]:
    gamma = float(fit.coefficients[0])
    se = float(fit.standard_errors[0])
    if not math.isfinite(se) or se <= 0.0 or fit.rss <= 1e-20 * fit.tss:
        raise DegenerateSeriesError(f"{name}: regression fits exactly (zero residual variance)")
    return gamma, se


def default_max_lags(nobs: int) -> int:
    """Schwert rule ⌊12 (n/100)^{1/4}⌋."""
    return int(12.0 * (nobs / 100.0) ** 0.25)


def select_adf_lags(y: np.ndarray, det: str, max_lags: int) -> int:
    """Lag count minimising AIC = n·ln(rss/n) + 2k on a common sample."""
    best_lag, best_aic = 0, math.inf
    for lags in range(max_lags + 1):
        try:
            fit = _df_regression(y, det, lags, start=max_lags)
        except InsufficientDataError:
            break
        if fit.rss <= 0.0:
            continue
        aic = fit.n * math.log(fit.rss / fit.n) + 2 * fit.k
        if aic < best_aic - 1e-12:
            best_lag, best_aic = lags, aic
    return best_lag


# ============================================================
# TESTS
# ============================================================

def adf_test(
    series: AnnualSeries,
    deterministic: str = "constant",
    lags: Union[int, str] = 0,
    max_lags: Optional[int] = None,
    critical_source: str = "table",
) -> UnitRootReport:
    """Augmented Dickey-Fuller test. `lags="aic"` picks the lag count."""
    det = normalize_deterministic(deterministic)
    y = series.to_array()
    _check_series(y, series.name)

    if lags == "aic":
        if max_lags is None:
            max_lags = default_max_lags(y.size - 1)
        lags = select_adf_lags(y, det, max_lags)
    elif not isinstance(lags, int) or lags < 0:
        raise ParameterError(f"lags must be a non-negative integer or 'aic', got {lags!r}")

    fit = _df_regression(y, det, lags)
    gamma, se = _gamma_and_se(fit, series.name)
    z_t = gamma / se

    return UnitRootReport(
        variable=series.name,
        test="ADF",
        deterministic=det,
        lags_or_bandwidth=lags,
        nobs=fit.n,
        z_t=z_t,
        p_value=mackinnon_pvalue(z_t, det),
        critical=critical_values(det, fit.n, critical_source),
        critical_source=critical_source,
    )


def auto_bandwidth(nobs: int) -> int:
    """⌊4 (n/100)^{2/9}⌋"""
    return int(4.0 * (nobs / 100.0) ** (2.0 / 9.0))


def pp_test(
    series: AnnualSeries,
    deterministic: str = "constant",
    bandwidth: Union[int, str] = "auto",
    critical_source: str = "table",
) -> UnitRootReport:
    """Phillips-Perron test: Z(rho) and Z(t) from the zero-lag DF regression."""
    det = normalize_deterministic(deterministic)
    y = series.to_array()
    _check_series(y, series.name)

    fit = _df_regression(y, det, 0)
    gamma, se = _gamma_and_se(fit, series.name)
    n = fit.n
    if bandwidth == "auto":
        bandwidth = auto_bandwidth(n)
    elif not isinstance(bandwidth, int) or bandwidth < 0:
        raise ParameterError(f"bandwidth must be a non-negative integer or 'auto', got {bandwidth!r}")

    s2 = fit.s2
    gamma0 = fit.rss / n
    lam2 = newey_west_lrv(fit.residuals, bandwidth)
    if lam2 <= 0.0:
        raise DegenerateSeriesError(f"{series.name}: long-run variance is zero")
    lam = math.sqrt(lam2)

    z_rho = n * gamma - 0.5 * (n * n * se * se / s2) * (lam2 - gamma0)
    z_t = math.sqrt(gamma0 / lam2) * (gamma / se) - 0.5 * (lam2 - gamma0) / lam * (n * se / math.sqrt(s2))

    return UnitRootReport(
        variable=series.name,
        test="PP",
        deterministic=det,
        lags_or_bandwidth=bandwidth,
        nobs=n,
        z_t=z_t,
        z_rho=z_rho,
        p_value=mackinnon_pvalue(z_t, det),
        critical=critical_values(det, n, critical_source),
        critical_rho=critical_values(det, n, "table", statistic="rho"),
        critical_source=critical_source,
    )


def integration_order(
    series: AnnualSeries,
    max_d: int = 2,
    deterministic: str = "constant",
    level: Union[str, float, int] = "5%",
    lags: Union[int, str] = 0,
) -> int:
    """Smallest d <= max_d whose d-th difference rejects a unit root."""
    if max_d < 0:
        raise ParameterError(f"max_d must be >= 0, got {max_d}")
    name = normalize_level(level)
    last: Optional[UnitRootReport] = None
    for d in range(max_d + 1):
        last = adf_test(difference(series, d), deterministic, lags)
        if last.reject_at[name]:
            return d
    raise NonStationaryError(
        f"{series.name}: no rejection at {name} up to d = {max_d} "
        f"(last Z(t) = {last.z_t:.3f}, p = {last.p_value:.4f})"
    )
