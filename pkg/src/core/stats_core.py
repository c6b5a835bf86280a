"""
Stats Core
==========
Shared numerical kernels: differencing, correlograms (ACF / PACF),
ordinary least squares and the Newey-West long-run variance.

All functions are pure.
"""

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import List, Optional

import numpy as np
from scipy import linalg

from .errors import (
    InsufficientDataError, ParameterError, SingularDesignError, ZeroVarianceError,
)
from .series_store import AnnualSeries

Z_95 = 1.959964


# ============================================================
# DATA STRUCTURES
# ============================================================

@dataclass(frozen=True)
class Correlogram:
    n: int
    max_lag: int
    acf: List[float]   # k = 0..max_lag, acf[0] == 1
    pacf: List[float]  # k = 1..max_lag
    band: float        # 95% white-noise band, ±band

    def rows(self):
        """(lag, acf, pacf, band) for lag 1..max_lag."""
        return [(k, self.acf[k], self.pacf[k - 1], self.band) for k in range(1, self.max_lag + 1)]

    def to_csv(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = ["lag,acf,pacf,band"]
        lines.append(f"0,{self.acf[0]!r},,{self.band!r}")
        for k, a, p, b in self.rows():
            lines.append(f"{k},{a!r},{p!r},{b!r}")
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path


@dataclass(frozen=True)
class RegressionFit:
    coefficients: np.ndarray
    standard_errors: np.ndarray
    residuals: np.ndarray
    rss: float
    n: int
    k: int
    tss: float = math.nan  # uncentered response sum of squares

    @property
    def s2(self) -> float:
        dof = self.n - self.k
        return self.rss / dof if dof > 0 else math.nan

    @property
    def t_values(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.coefficients / self.standard_errors


# ============================================================
# DIFFERENCING
# ============================================================

def difference(series: AnnualSeries, order: int) -> AnnualSeries:
    """d-th difference; first_year advances by d."""
    if order < 0:
        raise ParameterError(f"difference order must be >= 0, got {order}")
    if order == 0:
        return series
    if order >= len(series):
        raise InsufficientDataError(
            f"{series.name}: cannot take difference of order {order} of {len(series)} values"
        )
    values = np.diff(series.to_array(), n=order)
    return replace(
        series,
        first_year=series.first_year + order,
        values=tuple(values.tolist()),
        differences=series.differences + order,
    )


# ============================================================
# CORRELOGRAM
# ============================================================

def default_max_lag(n: int) -> int:
    return max(1, min(n // 2 - 1, 24))


def autocorrelations(x: np.ndarray, max_lag: int) -> np.ndarray:
    """Biased ACF: c_k = (1/n) Σ (x_t - x̄)(x_{t+k} - x̄), ρ_k = c_k / c_0."""
    x = np.asarray(x, dtype=float)
    n = x.size
    dev = x - x.mean()
    c0 = float(dev @ dev) / n
    if c0 <= 0.0:
        raise ZeroVarianceError("series is constant (zero variance)")
    acov = np.array([float(dev[: n - k] @ dev[k:]) / n for k in range(max_lag + 1)])
    return acov / c0


def durbin_levinson(rho: np.ndarray) -> np.ndarray:
    """PACF φ_kk, k = 1..len(rho)-1, from autocorrelations ρ_0..ρ_K."""
    max_lag = len(rho) - 1
    pacf = np.zeros(max_lag)
    phi = np.zeros(max_lag + 1)
    v = 1.0
    for k in range(1, max_lag + 1):
        num = rho[k] - float(phi[1:k] @ rho[k - 1:0:-1]) if k > 1 else rho[1]
        phi_kk = num / v if v > 0 else 0.0
        new = phi.copy()
        new[k] = phi_kk
        new[1:k] = phi[1:k] - phi_kk * phi[k - 1:0:-1]
        phi = new
        v *= (1.0 - phi_kk * phi_kk)
        pacf[k - 1] = phi_kk
    return pacf


def correlogram(series: AnnualSeries, max_lag: Optional[int] = None) -> Correlogram:
    n = len(series)
    if max_lag is None:
        max_lag = default_max_lag(n)
    if max_lag < 1:
        raise ParameterError(f"max_lag must be >= 1, got {max_lag}")
    if n < max_lag + 2:
        raise InsufficientDataError(f"{series.name}: {n} values, max_lag {max_lag} needs {max_lag + 2}")
    rho = autocorrelations(series.to_array(), max_lag)
    rho[0] = 1.0
    pacf = durbin_levinson(rho)
    return Correlogram(
        n=n,
        max_lag=max_lag,
        acf=rho.tolist(),
        pacf=pacf.tolist(),
        band=Z_95 / math.sqrt(n),
    )


# ============================================================
# OLS
# ============================================================

def ols(design, response) -> RegressionFit:
    """Least squares via economic QR; SE from s²(XᵀX)⁻¹ = s² R⁻¹R⁻ᵀ."""
    X = np.asarray(design, dtype=float)
    y = np.asarray(response, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n, k = X.shape
    if y.shape != (n,):
        raise ParameterError(f"response length {y.shape} does not match design rows {n}")
    if n < k:
        raise InsufficientDataError(f"design has {n} rows and {k} columns")

    Q, R = linalg.qr(X, mode="economic")
    diag = np.abs(np.diag(R))
    scale = float(diag.max()) if diag.size else 0.0
    if diag.size == 0 or diag.min() <= 1e-10 * scale:
        raise SingularDesignError("design matrix is rank deficient")

    beta = linalg.solve_triangular(R, Q.T @ y)
    residuals = y - X @ beta
    rss = float(residuals @ residuals)

    dof = n - k
    if dof > 0:
        r_inv = linalg.solve_triangular(R, np.eye(k))
        cov_unscaled = r_inv @ r_inv.T
        se = np.sqrt(np.maximum(np.diag(cov_unscaled), 0.0) * rss / dof)
    else:
        se = np.full(k, math.nan)

    return RegressionFit(
        coefficients=beta,
        standard_errors=se,
        residuals=residuals,
        rss=rss,
        n=n,
        k=k,
        tss=float(y @ y),
    )


# ============================================================
# LONG-RUN VARIANCE
# ============================================================

def newey_west_lrv(residuals, lags: int) -> float:
    """λ² = γ_0 + 2 Σ_{j=1..lags} (1 - j/(lags+1)) γ_j, γ_j = (1/n) Σ e_t e_{t-j}."""
    e = np.asarray(residuals, dtype=float)
    n = e.size
    if lags < 0:
        raise ParameterError(f"lags must be >= 0, got {lags}")
    if lags >= n:
        raise ParameterError(f"lags {lags} must be smaller than the residual count {n}")
    lrv = float(e @ e) / n
    for j in range(1, lags + 1):
        gamma = float(e[j:] @ e[:-j]) / n
        lrv += 2.0 * (1.0 - j / (lags + 1.0)) * gamma
    return max(lrv, 0.0)
