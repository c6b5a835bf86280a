#!/usr/bin/env python3
"""
ARIMA Engine
============
ARIMA(p,d,q)(+drift) estimation, AIC/BIC model selection and h-step
forecasting with normal prediction intervals.

Model on the d-times-differenced series w_t (first d observations are
conditioned on):
    φ(B)(w_t - μ) = θ(B) ε_t,   ε_t ~ N(0, σ²)
    φ(B) = 1 - φ_1 B - ... - φ_p B^p,   θ(B) = 1 + θ_1 B + ... + θ_q B^q

Estimation:
  exact-mle  state-space innovations (Kalman) recursion, stationary prior,
             σ² concentrated out
  css        conditional sum of squares, first p observations conditioned on,
             pre-sample errors zero

Coefficients are optimised in partial-autocorrelation form (tanh) so every
candidate is stationary and invertible when enforcement is on.

Selection:
  k   = p + q + drift + 1
  AIC = -2ℓ + 2k
  BIC = -2ℓ + k·ln(n_eff)
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg, optimize, signal
from scipy.stats import norm

from .errors import (
    ConvergenceError, ForecastError, InsufficientDataError, NonInvertibleError, ParameterError,
)
from .series_store import AnnualSeries
from .stats_core import Z_95, difference
from .unit_root import integration_order

# ============================================================
# CONFIGURATION
# ============================================================

MAX_P = 5
MAX_D = 2
MAX_Q = 5

METHODS = ("exact-mle", "css")
_METHOD_ALIASES = {"exact": "exact-mle", "mle": "exact-mle", "exact-mle": "exact-mle", "css": "css"}

DRIFT_POLICIES = ("none", "always", "auto")

VARIANCE_MODES = ("df", "mle")

_LOG_2PI = math.log(2.0 * math.pi)
_PACF_BOUND = 0.9999
_PENALTY = 1e10


def normalize_method(method: str) -> str:
    key = _METHOD_ALIASES.get(method.strip().lower())
    if key is None:
        raise ParameterError(f"unknown method '{method}' (expected {' | '.join(METHODS)})")
    return key


def resolve_drift(policy: str, d: int) -> bool:
    """auto: constant only for undifferenced models."""
    if policy == "always":
        return True
    if policy == "none":
        return False
    if policy == "auto":
        return d == 0
    raise ParameterError(f"unknown drift policy '{policy}' (expected {' | '.join(DRIFT_POLICIES)})")


def normalize_confidence(level: float) -> float:
    """95 or 0.95 -> 0.95"""
    level = float(level)
    if level > 1.0:
        level /= 100.0
    if not 0.0 < level < 1.0:
        raise ParameterError(f"confidence level must be in (0, 1) or (0, 100), got {level}")
    return level


def z_value(level: float) -> float:
    level = normalize_confidence(level)
    if abs(level - 0.95) < 1e-12:
        return Z_95
    return float(norm.ppf(0.5 + level / 2.0))


# ============================================================
# DATA STRUCTURES
# ============================================================

@dataclass(frozen=True, order=True)
class ArimaOrder:
    p: int
    d: int
    q: int

    def __post_init__(self):
        for name, value, ceiling in (("p", self.p, MAX_P), ("d", self.d, MAX_D), ("q", self.q, MAX_Q)):
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
                raise ParameterError(f"order {name} must be an integer, got {value!r}")
            if not 0 <= value <= ceiling:
                raise ParameterError(f"order {name}={value} outside 0..{ceiling}")
            object.__setattr__(self, name, int(value))

    @classmethod
    def parse(cls, text: str) -> "ArimaOrder":
        """'0,1,0' or '(0, 1, 0)'"""
        parts = [part.strip() for part in text.strip().strip("()").split(",")]
        if len(parts) != 3:
            raise ParameterError(f"order must be 'p,d,q', got '{text}'")
        try:
            return cls(*(int(part) for part in parts))
        except ValueError:
            raise ParameterError(f"order must be three integers, got '{text}'") from None

    def as_tuple(self) -> Tuple[int, int, int]:
        return (self.p, self.d, self.q)

    def __str__(self) -> str:
        return f"({self.p}, {self.d}, {self.q})"


@dataclass(frozen=True)
class FitOptions:
    # Optimizer
    enforce: bool = True      # stationarity / invertibility via PACF transform
    restarts: int = 3         # extra deterministic starts while no start has converged
    maxiter: int = 500
    gtol: float = 1e-6
    grad_tol: float = 1e-3    # max |gradient| accepted after a precision-loss stop
    css_start: bool = True    # seed exact-mle with the css estimate

    def __post_init__(self):
        if self.restarts < 0 or self.restarts > 3:
            raise ParameterError(f"restarts must be 0..3, got {self.restarts}")


@dataclass(frozen=True)
class ArimaFit:
    order: ArimaOrder
    drift: bool
    ar: Tuple[float, ...]
    ma: Tuple[float, ...]
    mu: float
    sigma2: float
    loglik: float
    aic: float
    bic: float
    n_eff: int
    residuals: Tuple[float, ...]
    method: str
    degenerate: bool = False
    series: Optional[AnnualSeries] = field(default=None, repr=False, compare=False)
    state: Tuple[float, ...] = field(default=(), repr=False, compare=False)

    @property
    def k(self) -> int:
        return parameter_count(self.order, self.drift)

    @property
    def sigma2_df(self) -> float:
        dof = self.n_eff - self.order.p - self.order.q - int(self.drift)
        return self.sigma2 * self.n_eff / dof if dof > 0 else self.sigma2

    def to_dict(self) -> dict:
        return {
            "order": list(self.order.as_tuple()),
            "drift": self.drift,
            "method": self.method,
            "ar": list(self.ar),
            "ma": list(self.ma),
            "mu": self.mu,
            "sigma2": self.sigma2,
            "loglik": self.loglik,
            "aic": self.aic,
            "bic": self.bic,
            "k": self.k,
            "n_eff": self.n_eff,
            "degenerate": self.degenerate,
        }


@dataclass(frozen=True)
class ForecastRow:
    year: int
    point: float
    lower: float
    upper: float

    @property
    def half_width(self) -> float:
        return (self.upper - self.lower) / 2.0


@dataclass(frozen=True)
class ForecastTable:
    name: str
    unit: str
    order: ArimaOrder
    drift: bool
    level: float
    rows: Tuple[ForecastRow, ...]
    degenerate: bool = False

    @property
    def years(self) -> List[int]:
        return [row.year for row in self.rows]

    @property
    def points(self) -> List[float]:
        return [row.point for row in self.rows]

    def row_at(self, year: int) -> ForecastRow:
        for row in self.rows:
            if row.year == year:
                return row
        raise ParameterError(f"{self.name}: no forecast for {year} ({self.rows[0].year}-{self.rows[-1].year})")

    def point_at(self, year: int) -> float:
        return self.row_at(year).point

    def to_series(self) -> AnnualSeries:
        return AnnualSeries(
            name=f"{self.name}_forecast",
            unit=self.unit,
            first_year=self.rows[0].year,
            values=tuple(self.points),
            provenance=f"ARIMA{self.order}{'+drift' if self.drift else ''} forecast of {self.name}",
        )

    @property
    def _pct(self) -> str:
        return f"{self.level * 100:g}".replace(".", "_")

    def to_csv(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = [f"year,forecast,lower_{self._pct},upper_{self._pct}"]
        for row in self.rows:
            lines.append(f"{row.year},{row.point!r},{row.lower!r},{row.upper!r}")
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "unit": self.unit,
            "order": list(self.order.as_tuple()),
            "drift": self.drift,
            "level": self.level,
            "degenerate": self.degenerate,
            "rows": [asdict(row) for row in self.rows],
        }


@dataclass(frozen=True)
class GridCandidate:
    order: ArimaOrder
    drift: bool
    aic: float
    bic: float
    loglik: float
    k: int
    status: str  # ok | degenerate | failed:<reason>

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def rank_key(self):
        if not self.ok:
            return (1, math.inf, self.k, math.inf, self.order.as_tuple(), self.drift)
        return (0, self.aic, self.k, self.bic, self.order.as_tuple(), self.drift)


@dataclass(frozen=True)
class GridResult:
    candidates: Tuple[GridCandidate, ...]
    best_aic: Optional[ArimaOrder]
    best_bic: Optional[ArimaOrder]
    fits: Dict[ArimaOrder, ArimaFit] = field(default_factory=dict, repr=False, compare=False)

    def fit_for(self, order: ArimaOrder) -> ArimaFit:
        if order not in self.fits:
            raise ParameterError(f"no converged fit for {order}")
        return self.fits[order]

    def candidate(self, order: ArimaOrder) -> GridCandidate:
        for cand in self.candidates:
            if cand.order == order:
                return cand
        raise ParameterError(f"{order} not in grid")

    def to_csv(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = ["p,d,q,aic,bic,status"]
        for c in self.candidates:
            lines.append(f"{c.order.p},{c.order.d},{c.order.q},{c.aic!r},{c.bic!r},{c.status}")
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path

    def to_dict(self) -> dict:
        return {
            "best_aic": list(self.best_aic.as_tuple()) if self.best_aic else None,
            "best_bic": list(self.best_bic.as_tuple()) if self.best_bic else None,
            "candidates": [
                {
                    "order": list(c.order.as_tuple()), "drift": c.drift, "aic": c.aic,
                    "bic": c.bic, "loglik": c.loglik, "k": c.k, "status": c.status,
                }
                for c in self.candidates
            ],
        }


@dataclass(frozen=True)
class StepwiseResult:
    order: ArimaOrder
    drift: bool
    fit: ArimaFit
    visited: Tuple[GridCandidate, ...]


# ============================================================
# INFORMATION CRITERIA
# ============================================================

def parameter_count(order: ArimaOrder, drift: bool) -> int:
    """k counts σ²."""
    return order.p + order.q + int(drift) + 1


def _criteria(loglik: float, k: int, n_eff: int) -> Tuple[float, float]:
    aic = -2.0 * loglik + 2.0 * k
    bic = -2.0 * loglik + k * math.log(n_eff)
    return aic, bic


def information_criteria(fit: ArimaFit) -> Tuple[float, float]:
    """(aic, bic) recomputed from ℓ, k and n_eff."""
    return _criteria(fit.loglik, fit.k, fit.n_eff)


# ============================================================
# PARAMETER TRANSFORMS
# ============================================================

def pacf_to_coefficients(raw: np.ndarray) -> np.ndarray:
    """Unconstrained -> stationary AR coefficients (tanh + Durbin-Levinson)."""
    r = np.clip(np.tanh(np.asarray(raw, dtype=float)), -_PACF_BOUND, _PACF_BOUND)
    phi = np.zeros(0)
    for r_k in r:
        phi = np.concatenate([phi - r_k * phi[::-1], [r_k]])
    return phi


def coefficients_to_pacf(phi: np.ndarray) -> Optional[np.ndarray]:
    """Inverse of pacf_to_coefficients; None when phi is not stationary."""
    a = np.asarray(phi, dtype=float).copy()
    r = np.zeros(a.size)
    for k in range(a.size - 1, -1, -1):
        r_k = a[k]
        if abs(r_k) >= 1.0:
            return None
        r[k] = r_k
        if k > 0:
            a = (a[:k] + r_k * a[:k][::-1]) / (1.0 - r_k * r_k)
    return np.arctanh(np.clip(r, -_PACF_BOUND, _PACF_BOUND))


def _unpack(params: np.ndarray, p: int, q: int, drift: bool, enforce: bool):
    i = 0
    mu = 0.0
    if drift:
        mu = float(params[0])
        i = 1
    ar_raw = params[i:i + p]
    ma_raw = params[i + p:i + p + q]
    if enforce:
        return mu, pacf_to_coefficients(ar_raw), -pacf_to_coefficients(ma_raw)
    return mu, np.asarray(ar_raw, dtype=float), np.asarray(ma_raw, dtype=float)


def _min_root_modulus(coefs: np.ndarray) -> float:
    """Smallest |root| of 1 + c_1 z + ... + c_m z^m (inf for a constant)."""
    poly = np.r_[1.0, np.asarray(coefs, dtype=float)]
    roots = np.roots(poly[::-1])
    return float(np.abs(roots).min()) if roots.size else math.inf


def _is_stationary(phi: np.ndarray) -> bool:
    return _min_root_modulus(-phi) > 1.0


# ============================================================
# LIKELIHOODS
# ============================================================

def _state_space(phi: np.ndarray, theta: np.ndarray):
    p, q = phi.size, theta.size
    r = max(p, q + 1)
    T = np.zeros((r, r))
    T[:p, 0] = phi
    T[:-1, 1:] += np.eye(r - 1)
    R = np.zeros(r)
    R[0] = 1.0
    R[1:q + 1] = theta
    return T, np.outer(R, R)


def kalman_innovations(x: np.ndarray, phi: np.ndarray, theta: np.ndarray):
    """Innovations v_t, their scaled variances F_t and the next predicted state.

    Returns None when the stationary prior cannot be formed.
    """
    T, RR = _state_space(phi, theta)
    try:
        P = linalg.solve_discrete_lyapunov(T, RR)
    except (linalg.LinAlgError, ValueError):
        return None
    if not np.all(np.isfinite(P)) or P[0, 0] <= 0.0:
        return None

    n = x.size
    a = np.zeros(T.shape[0])
    v = np.empty(n)
    F = np.empty(n)
    steady = False
    K = np.zeros(T.shape[0])
    for t in range(n):
        f_t = P[0, 0]
        v_t = x[t] - a[0]
        if not steady:
            K = T @ P[:, 0] / f_t
            P_next = T @ P @ T.T + RR - np.outer(K, K) * f_t
            if np.max(np.abs(P_next - P)) < 1e-13 * max(1.0, float(np.abs(P).max())):
                steady = True
            P = P_next
        a = T @ a + K * v_t
        v[t] = v_t
        F[t] = f_t
    return v, F, a


def _exact_loglik(x: np.ndarray, phi: np.ndarray, theta: np.ndarray):
    """(ℓ, σ̂², v, next state) with σ² concentrated out, or None."""
    out = kalman_innovations(x, phi, theta)
    if out is None:
        return None
    v, F, state = out
    if np.any(F <= 0.0):
        return None
    n = x.size
    sigma2 = float(np.sum(v * v / F)) / n
    if not (sigma2 > 0.0 and math.isfinite(sigma2)):
        return None
    loglik = -0.5 * n * (_LOG_2PI + math.log(sigma2) + 1.0) - 0.5 * float(np.sum(np.log(F)))
    return loglik, sigma2, v, state


def css_residuals(x: np.ndarray, phi: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """e_t for t = p..n-1 with pre-sample errors zero."""
    p = phi.size
    n = x.size
    u = x[p:].copy()
    for i in range(1, p + 1):
        u -= phi[i - 1] * x[p - i:n - i]
    if theta.size == 0:
        return u
    return signal.lfilter([1.0], np.r_[1.0, theta], u)


def _css_loglik(x: np.ndarray, phi: np.ndarray, theta: np.ndarray):
    e = css_residuals(x, phi, theta)
    m = e.size
    sigma2 = float(e @ e) / m
    if not (sigma2 > 0.0 and math.isfinite(sigma2)):
        return None
    loglik = -0.5 * m * (_LOG_2PI + math.log(sigma2) + 1.0)
    return loglik, sigma2, e


# ============================================================
# ESTIMATION
# ============================================================

def _objective(method: str, w: np.ndarray, p: int, q: int, drift: bool, enforce: bool):
    def negloglik(params: np.ndarray) -> float:
        mu, phi, theta = _unpack(params, p, q, drift, enforce)
        if not enforce and p and not _is_stationary(phi):
            return _PENALTY
        x = w - mu
        out = _exact_loglik(x, phi, theta) if method == "exact-mle" else _css_loglik(x, phi, theta)
        if out is None or not math.isfinite(out[0]):
            return _PENALTY
        return -out[0]
    return negloglik


def _restart_point(x: np.ndarray, i: int) -> np.ndarray:
    signs = np.array([(-1.0) ** (i + j) for j in range(x.size)])
    return x + 0.25 * (i + 1) * signs


def _converged(res, options: FitOptions) -> bool:
    if res.success:
        return True
    # BFGS status 2: precision loss in the line search; accept it at a stationary point
    jac = getattr(res, "jac", None)
    if res.status != 2 or jac is None or not np.all(np.isfinite(jac)):
        return False
    return float(np.max(np.abs(jac), initial=0.0)) <= options.grad_tol


def _better(res, best, options: FitOptions) -> bool:
    if best is None:
        return True
    tol = 1e-8 * max(1.0, abs(best.fun))
    if res.fun < best.fun - tol:
        return True
    return res.fun <= best.fun + tol and _converged(res, options) and not _converged(best, options)


def _optimize(objective, starts: Sequence[np.ndarray], options: FitOptions):
    """Best BFGS result over the starts, then restarts until one converges.

    Returns None when every start lands on the penalty.
    """
    def run(x0):
        res = optimize.minimize(objective, x0, method="BFGS",
                                options={"maxiter": options.maxiter, "gtol": options.gtol})
        if not math.isfinite(res.fun) or res.fun >= _PENALTY:
            return None
        return res

    best = None
    for x0 in starts:
        res = run(x0)
        if res is not None and _better(res, best, options):
            best = res
    base = best.x if best is not None else np.asarray(starts[0], dtype=float)
    for i in range(options.restarts):
        if best is not None and _converged(best, options):
            break
        res = run(_restart_point(base, i))
        if res is not None and _better(res, best, options):
            best = res
    return best


def _degenerate_fit(series, order, drift, method, mu, n_eff, residuals) -> ArimaFit:
    k = parameter_count(order, drift)
    return ArimaFit(
        order=order, drift=drift,
        ar=(0.0,) * order.p, ma=(0.0,) * order.q,
        mu=mu, sigma2=0.0, loglik=math.inf,
        aic=-math.inf, bic=-math.inf, n_eff=n_eff,
        residuals=tuple(residuals), method=method,
        degenerate=True, series=series,
    )


def _fit_white_noise(series, w, order, drift, method) -> ArimaFit:
    """p = q = 0 closed form."""
    n = w.size
    mu = float(w.mean()) if drift else 0.0
    e = w - mu
    sigma2 = float(e @ e) / n
    if sigma2 <= 1e-24 * max(float(w @ w) / n, 1e-300):
        return _degenerate_fit(series, order, drift, method, mu, n, e)
    loglik = -0.5 * n * (_LOG_2PI + math.log(sigma2) + 1.0)
    aic, bic = _criteria(loglik, parameter_count(order, drift), n)
    return ArimaFit(
        order=order, drift=drift, ar=(), ma=(), mu=mu, sigma2=sigma2,
        loglik=loglik, aic=aic, bic=bic, n_eff=n,
        residuals=tuple(e.tolist()), method=method, series=series,
        state=(0.0,),
    )


def fit(
    series: AnnualSeries,
    order: ArimaOrder,
    drift: bool = False,
    method: str = "exact-mle",
    options: Optional[FitOptions] = None,
) -> ArimaFit:
    """Maximum-likelihood ARIMA fit conditioned on the first d observations."""
    options = options or FitOptions()
    method = normalize_method(method)
    w = difference(series, order.d).to_array()
    n = w.size
    p, q = order.p, order.q
    if n < p + q + 5:
        raise InsufficientDataError(
            f"{series.name}: ARIMA{order} needs {p + q + 5} differenced values, got {n}"
        )

    if p == 0 and q == 0:
        return _fit_white_noise(series, w, order, drift, method)

    scale = float(w.std())
    if scale == 0.0:
        scale = math.sqrt(float(w @ w) / n)
    if scale == 0.0:
        return _degenerate_fit(series, order, drift, method, 0.0, n, w)
    ws = w / scale

    zero = np.array(([float(ws.mean())] if drift else []) + [0.0] * (p + q))
    starts = [zero]
    if method == "exact-mle" and options.css_start:
        css = _optimize(_objective("css", ws, p, q, drift, options.enforce), [zero], options)
        if css is not None:
            starts.insert(0, css.x)

    best = _optimize(_objective(method, ws, p, q, drift, options.enforce), starts, options)
    if best is None or not _converged(best, options):
        reason = "no finite likelihood" if best is None else best.message
        raise ConvergenceError(
            f"{series.name}: ARIMA{order} did not converge after "
            f"{len(starts) + options.restarts} starts ({reason})"
        )

    mu_s, phi, theta = _unpack(best.x, p, q, drift, options.enforce)
    mu = mu_s * scale
    if options.enforce:
        if p and _min_root_modulus(-phi) <= 1.0:
            raise NonInvertibleError(f"{series.name}: ARIMA{order} AR polynomial has a unit root")
        if q and _min_root_modulus(theta) <= 1.0:
            raise NonInvertibleError(f"{series.name}: ARIMA{order} MA polynomial is not invertible")

    x = w - mu
    if method == "exact-mle":
        out = _exact_loglik(x, phi, theta)
        if out is None:
            raise ConvergenceError(f"{series.name}: ARIMA{order} likelihood undefined at the optimum")
        loglik, sigma2, residuals, state = out
        n_eff = n
    else:
        out = _css_loglik(x, phi, theta)
        if out is None:
            return _degenerate_fit(series, order, drift, method, mu, n - p, css_residuals(x, phi, theta))
        loglik, sigma2, residuals = out
        state = ()
        n_eff = n - p

    if sigma2 <= 1e-24 * scale * scale:
        return _degenerate_fit(series, order, drift, method, mu, n_eff, residuals)

    aic, bic = _criteria(loglik, parameter_count(order, drift), n_eff)
    return ArimaFit(
        order=order, drift=drift,
        ar=tuple(phi.tolist()), ma=tuple(theta.tolist()),
        mu=mu, sigma2=sigma2, loglik=loglik, aic=aic, bic=bic, n_eff=n_eff,
        residuals=tuple(np.asarray(residuals).tolist()), method=method,
        series=series,
        state=tuple(np.asarray(state).tolist()),
    )


# ============================================================
# MODEL SELECTION
# ============================================================

def _evaluate(series, order, drift, method, options) -> Tuple[GridCandidate, Optional[ArimaFit]]:
    k = parameter_count(order, drift)
    try:
        result = fit(series, order, drift=drift, method=method, options=options)
    except ForecastError as e:
        return GridCandidate(order, drift, math.nan, math.nan, math.nan, k, f"failed:{type(e).__name__}"), None
    if result.degenerate:
        return GridCandidate(order, drift, math.nan, math.nan, math.inf, k, "degenerate"), result
    return GridCandidate(order, drift, result.aic, result.bic, result.loglik, k, "ok"), result


def _grid_orders(p_max: int, d_min: int, d_max: int, q_max: int) -> List[ArimaOrder]:
    return [ArimaOrder(p, d, q)
            for d in range(d_min, d_max + 1)
            for p in range(p_max + 1)
            for q in range(q_max + 1)]


def grid_search(
    series: AnnualSeries,
    p_max: int = 3,
    d_max: int = 2,
    q_max: int = 3,
    drift: str = "auto",
    method: str = "exact-mle",
    options: Optional[FitOptions] = None,
    d_min: int = 0,
    orders: Optional[Iterable[ArimaOrder]] = None,
    workers: Optional[int] = None,
    on_log: Optional[Callable[[str], None]] = None,
) -> GridResult:
    """Fit every order in the lattice and rank by AIC.

    Ties: fewer parameters, then lower BIC, then (p, d, q). The ranking
    does not depend on evaluation order or worker count.
    """
    method = normalize_method(method)
    resolve_drift(drift, 0)
    if orders is None:
        if not (0 <= p_max <= MAX_P and 0 <= q_max <= MAX_Q and 0 <= d_min <= d_max <= MAX_D):
            raise ParameterError(
                f"grid bounds p<={p_max}, d={d_min}..{d_max}, q<={q_max} outside "
                f"ceilings p<={MAX_P}, d<={MAX_D}, q<={MAX_Q}"
            )
        orders = _grid_orders(p_max, d_min, d_max, q_max)
    orders = list(dict.fromkeys(orders))
    if not orders:
        raise ParameterError("grid has no candidate orders")

    if workers is None:
        workers = int(os.getenv("FORECAST_WORKERS", "1"))
    workers = max(1, workers)

    def evaluate(order: ArimaOrder):
        return _evaluate(series, order, resolve_drift(drift, order.d), method, options)

    if workers > 1 and len(orders) > 1:
        results = []
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(evaluate, order) for order in orders]
            for future in as_completed(futures):
                results.append(future.result())
    else:
        results = [evaluate(order) for order in orders]

    results.sort(key=lambda item: item[0].rank_key())
    candidates = tuple(cand for cand, _ in results)
    fits = {cand.order: result for cand, result in results if result is not None and cand.ok}

    ok = [c for c in candidates if c.ok]
    best_aic = ok[0].order if ok else None
    best_bic = min(ok, key=lambda c: (c.bic, c.k, c.aic, c.order.as_tuple())).order if ok else None

    if on_log:
        for cand in candidates:
            on_log(f"[GRID] {cand.order}{' +drift' if cand.drift else ''} "
                   f"aic={cand.aic:.4f} bic={cand.bic:.4f} status={cand.status}")
        on_log(f"[GRID] best_aic={best_aic} best_bic={best_bic} ({len(ok)}/{len(candidates)} ok)")

    return GridResult(candidates=candidates, best_aic=best_aic, best_bic=best_bic, fits=fits)


def stepwise_search(
    series: AnnualSeries,
    max_p: int = MAX_P,
    max_q: int = MAX_Q,
    max_d: int = MAX_D,
    method: str = "exact-mle",
    options: Optional[FitOptions] = None,
    on_log: Optional[Callable[[str], None]] = None,
) -> StepwiseResult:
    """Stepwise AIC search in (p, q, drift) after choosing d by ADF at 5%."""
    method = normalize_method(method)
    if len(series) < 10:
        raise InsufficientDataError(f"{series.name}: stepwise selection needs >= 10 values, got {len(series)}")

    d = integration_order(series, max_d=max_d, deterministic="constant", level="5%")
    allow_drift = d <= 1
    if on_log:
        on_log(f"[STEPWISE] {series.name}: d={d} (ADF, constant, 5%)")

    cache: Dict[Tuple[int, int, bool], Tuple[GridCandidate, Optional[ArimaFit]]] = {}

    def visit(p: int, q: int, with_drift: bool):
        key = (p, q, with_drift)
        if key not in cache:
            cache[key] = _evaluate(series, ArimaOrder(p, d, q), with_drift, method, options)
            if on_log:
                cand = cache[key][0]
                on_log(f"[STEPWISE] {cand.order}{' +drift' if with_drift else ''} "
                       f"aic={cand.aic:.4f} status={cand.status}")
        return cache[key]

    def rank(item):
        return item[0].rank_key()

    starts = [(p, q) for p, q in ((0, 0), (1, 0), (0, 1), (1, 1)) if p <= max_p and q <= max_q]
    evaluated = [visit(p, q, allow_drift) for p, q in starts]
    ok = [item for item in evaluated if item[0].ok]
    if not ok:
        raise ConvergenceError(f"{series.name}: no starting model could be fitted")
    best = min(ok, key=rank)

    while True:
        cand = best[0]
        p, q, cur_drift = cand.order.p, cand.order.q, cand.drift
        moves = [(p - 1, q, cur_drift), (p + 1, q, cur_drift), (p, q - 1, cur_drift), (p, q + 1, cur_drift)]
        if allow_drift:
            moves.append((p, q, not cur_drift))
        neighbours = [visit(mp, mq, md) for mp, mq, md in moves if 0 <= mp <= max_p and 0 <= mq <= max_q]
        improving = [item for item in neighbours if item[0].ok and item[0].aic < cand.aic - 1e-8]
        if not improving:
            break
        best = min(improving, key=rank)
        if on_log:
            on_log(f"[STEPWISE] move to {best[0].order}{' +drift' if best[0].drift else ''}")

    visited = tuple(sorted((item[0] for item in cache.values()), key=GridCandidate.rank_key))
    return StepwiseResult(order=best[0].order, drift=best[0].drift, fit=best[1], visited=visited)


def auto_select(series: AnnualSeries, **kwargs) -> ArimaOrder:
    """Order chosen by the stepwise search (see stepwise_search)."""
    return stepwise_search(series, **kwargs).order


def auto_fit(
    series: AnnualSeries,
    drift: Optional[bool] = None,
    method: str = "exact-mle",
    options: Optional[FitOptions] = None,
    on_log: Optional[Callable[[str], None]] = None,
) -> ArimaFit:
    """Stepwise order, then that order re-fitted with the requested drift.

    drift=None keeps whatever the stepwise AIC toggle chose.
    """
    result = stepwise_search(series, method=method, options=options, on_log=on_log)
    if drift is None or drift == result.drift:
        return result.fit
    if on_log:
        on_log(f"[STEPWISE] re-fit {result.order} with drift={'on' if drift else 'off'}")
    return fit(series, result.order, drift=drift, method=method, options=options)


# ============================================================
# FORECASTING
# ============================================================

def psi_weights(ar: Sequence[float], ma: Sequence[float], d: int, count: int) -> np.ndarray:
    """ψ_0..ψ_{count-1} of θ(B) / (φ(B)(1-B)^d)."""
    poly = np.r_[1.0, -np.asarray(ar, dtype=float)]
    for _ in range(d):
        poly = np.convolve(poly, [1.0, -1.0])
    phi_star = -poly[1:]
    theta = np.asarray(ma, dtype=float)
    psi = np.zeros(count)
    psi[0] = 1.0
    for j in range(1, count):
        value = theta[j - 1] if j <= theta.size else 0.0
        for i in range(1, min(j, phi_star.size) + 1):
            value += phi_star[i - 1] * psi[j - i]
        psi[j] = value
    return psi


def _forecast_differenced(fit_: ArimaFit, horizon: int) -> np.ndarray:
    phi = np.asarray(fit_.ar, dtype=float)
    theta = np.asarray(fit_.ma, dtype=float)
    if fit_.method == "exact-mle" and fit_.state and not fit_.degenerate:
        T, _ = _state_space(phi, theta)
        a = np.asarray(fit_.state, dtype=float)
        out = np.empty(horizon)
        for h in range(horizon):
            out[h] = a[0]
            a = T @ a
        return fit_.mu + out

    w = difference(fit_.series, fit_.order.d).to_array()
    x = list(w - fit_.mu)
    e = [0.0] * (len(x) - len(fit_.residuals)) + list(fit_.residuals)
    p, q = phi.size, theta.size
    out = np.empty(horizon)
    for h in range(horizon):
        value = sum(phi[i] * x[-1 - i] for i in range(p))
        value += sum(theta[j] * e[-1 - j] for j in range(q))
        x.append(value)
        e.append(0.0)
        out[h] = value
    return fit_.mu + out


def forecast(
    fit_: ArimaFit,
    horizon: int,
    level: float = 0.95,
    variance: str = "df",
) -> ForecastTable:
    """h-step forecasts on the original scale with ψ-weight intervals."""
    if horizon < 1:
        raise ParameterError(f"horizon must be >= 1, got {horizon}")
    if variance not in VARIANCE_MODES:
        raise ParameterError(f"variance must be one of {', '.join(VARIANCE_MODES)}")
    if fit_.series is None:
        raise ParameterError("fit carries no series to forecast from")
    level = normalize_confidence(level)
    z = z_value(level)

    series = fit_.series
    d = fit_.order.d
    points = _forecast_differenced(fit_, horizon)
    levels = [series.to_array()]
    for _ in range(d):
        levels.append(np.diff(levels[-1]))
    for j in range(d - 1, -1, -1):
        points = levels[j][-1] + np.cumsum(points)

    sigma2 = fit_.sigma2_df if variance == "df" else fit_.sigma2
    psi = psi_weights(fit_.ar, fit_.ma, d, horizon)
    half = z * np.sqrt(sigma2 * np.cumsum(psi * psi))

    rows = tuple(
        ForecastRow(year=series.last_year + h + 1, point=float(points[h]),
                    lower=float(points[h] - half[h]), upper=float(points[h] + half[h]))
        for h in range(horizon)
    )
    return ForecastTable(
        name=series.name, unit=series.unit, order=fit_.order, drift=fit_.drift,
        level=level, rows=rows, degenerate=fit_.degenerate,
    )
