import math

import numpy as np
import pytest
from scipy.linalg import toeplitz
from scipy.optimize import OptimizeResult
from scipy.stats import multivariate_normal

from src.core.arima_engine import (
    ArimaOrder, FitOptions, _better, _converged, auto_fit, auto_select, coefficients_to_pacf,
    css_residuals, fit, forecast, grid_search, information_criteria, kalman_innovations,
    normalize_confidence, normalize_method, pacf_to_coefficients, parameter_count,
    psi_weights, resolve_drift, stepwise_search, z_value,
)
from src.core.errors import ConvergenceError, InsufficientDataError, ParameterError

from conftest import make_series, simulate_arma

# BFGS stops after one iteration and no restart is tried
_ONE_STEP = FitOptions(maxiter=1, restarts=0, css_start=False)


# ============================================================
# ORDERS AND OPTIONS
# ============================================================

def test_order_parse():
    assert ArimaOrder.parse("0,1,0") == ArimaOrder(0, 1, 0)
    assert ArimaOrder.parse("(1, 2, 1)") == ArimaOrder(1, 2, 1)
    assert str(ArimaOrder(0, 2, 1)) == "(0, 2, 1)"


@pytest.mark.parametrize("text", ["0,1", "a,b,c", "0,3,0", "6,0,0", "-1,0,0"])
def test_order_parse_rejects(text):
    with pytest.raises(ParameterError):
        ArimaOrder.parse(text)


def test_option_validation():
    with pytest.raises(ParameterError):
        FitOptions(restarts=4)
    with pytest.raises(ParameterError):
        normalize_method("ols")
    assert normalize_method("exact") == "exact-mle"


def test_drift_policies():
    assert resolve_drift("auto", 0) is True
    assert resolve_drift("auto", 1) is False
    assert resolve_drift("always", 2) is True
    assert resolve_drift("none", 0) is False
    with pytest.raises(ParameterError):
        resolve_drift("sometimes", 0)


def test_confidence_levels():
    assert normalize_confidence(95) == pytest.approx(0.95)
    assert z_value(0.95) == 1.959964
    assert z_value(90) == pytest.approx(1.644854, abs=1e-6)
    with pytest.raises(ParameterError):
        normalize_confidence(0)


def test_parameter_count_includes_variance():
    assert parameter_count(ArimaOrder(0, 1, 0), True) == 2
    assert parameter_count(ArimaOrder(2, 1, 1), False) == 4


def test_pacf_transform_round_trip():
    phi = pacf_to_coefficients(np.array([0.4, -0.9, 1.3]))
    assert np.all(np.abs(np.roots(np.r_[1.0, -phi][::-1])) > 1.0)
    assert np.allclose(pacf_to_coefficients(coefficients_to_pacf(phi)), phi)
    assert coefficients_to_pacf(np.array([1.2])) is None


def test_psi_weights():
    assert np.allclose(psi_weights([0.5], [], 0, 4), [1.0, 0.5, 0.25, 0.125])
    assert np.allclose(psi_weights([], [], 1, 4), [1.0, 1.0, 1.0, 1.0])
    assert np.allclose(psi_weights([], [0.3], 0, 3), [1.0, 0.3, 0.0])
    assert np.allclose(psi_weights([], [], 2, 4), [1.0, 2.0, 3.0, 4.0])


# ============================================================
# EXCHANGE-RATE RANDOM WALK WITH DRIFT
# ============================================================

class TestExchangeRateDrift:
    def test_closed_form_fit(self, fx):
        result = fit(fx, ArimaOrder(0, 1, 0), drift=True)
        assert result.mu == pytest.approx(1.419470, abs=1e-5)
        assert result.sigma2 == pytest.approx(5.723691, abs=1e-4)
        assert result.n_eff == 53
        assert result.k == 2
        assert information_criteria(result) == pytest.approx((result.aic, result.bic))

    def test_forecast_2025_and_2047(self, fx):
        table = forecast(fit(fx, ArimaOrder(0, 1, 0), drift=True), 2047 - 2024)
        row = table.row_at(2025)
        assert row.point == pytest.approx(84.20917, abs=1e-3)
        assert row.lower == pytest.approx(79.47523, abs=0.01)
        assert row.upper == pytest.approx(88.94311, abs=0.01)
        assert table.point_at(2047) == pytest.approx(115.4375, abs=0.01)
        assert table.years[0] == 2025 and table.years[-1] == 2047

    def test_intervals_widen_with_horizon(self, fx):
        table = forecast(fit(fx, ArimaOrder(0, 1, 0), drift=True), 10)
        widths = [row.half_width for row in table.rows]
        assert widths == sorted(widths)
        assert widths[3] == pytest.approx(widths[0] * 2.0)

    def test_mle_variance_is_narrower(self, fx):
        result = fit(fx, ArimaOrder(0, 1, 0), drift=True)
        df = forecast(result, 1, variance="df").rows[0]
        mle = forecast(result, 1, variance="mle").rows[0]
        assert mle.half_width < df.half_width
        assert mle.half_width == pytest.approx(1.959964 * math.sqrt(result.sigma2))

    def test_sub_period(self, fx):
        table = forecast(fit(fx.slice(1991, 2024), ArimaOrder(0, 1, 0), drift=True), 1)
        assert table.point_at(2025) == pytest.approx(84.75476, abs=1e-3)

    def test_stepwise_keeps_random_walk_with_drift(self, fx):
        result = stepwise_search(fx)
        assert result.order == ArimaOrder(0, 1, 0)
        assert result.drift is True


# ============================================================
# GDP 1991-2025
# ============================================================

class TestGdpGrid:
    @pytest.fixture(scope="class")
    def grid(self, gdp_sub):
        return grid_search(gdp_sub, p_max=1, d_max=2, q_max=1, drift="none")

    def test_best_order(self, grid):
        assert grid.best_aic == ArimaOrder(0, 2, 1)
        assert len(grid.candidates) == 12

    def test_criteria(self, grid):
        assert grid.candidate(ArimaOrder(0, 2, 0)).aic == pytest.approx(989.6011, abs=0.5)
        assert grid.candidate(ArimaOrder(0, 2, 1)).aic == pytest.approx(984.4337, abs=2.0)

    def test_candidates_are_ranked(self, grid):
        ok = [c.aic for c in grid.candidates if c.ok]
        assert ok == sorted(ok)

    def test_forecast_2047(self, gdp_sub):
        table = forecast(fit(gdp_sub, ArimaOrder(0, 2, 1)), 2047 - 2025)
        assert table.point_at(2047) == pytest.approx(98002564.0, rel=0.005)

    def test_grid_csv(self, grid, tmp_path):
        lines = grid.to_csv(tmp_path / "grid.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "p,d,q,aic,bic,status"
        assert lines[1].startswith("0,2,1,")


def test_parallel_grid_matches_serial(gdp_sub):
    serial = grid_search(gdp_sub, p_max=1, d_min=1, d_max=2, q_max=1, drift="none", workers=1)
    parallel = grid_search(gdp_sub, p_max=1, d_min=1, d_max=2, q_max=1, drift="none", workers=4)
    assert [(c.order, c.status) for c in serial.candidates] == [(c.order, c.status) for c in parallel.candidates]
    assert [c.aic for c in serial.candidates if c.ok] == [c.aic for c in parallel.candidates if c.ok]
    assert serial.best_aic == parallel.best_aic


def test_grid_bounds():
    series = make_series(simulate_arma(40))
    with pytest.raises(ParameterError):
        grid_search(series, p_max=6)
    with pytest.raises(ParameterError):
        grid_search(series, d_min=2, d_max=1)


def test_grid_logs_every_candidate(fx):
    lines = []
    grid_search(fx, p_max=1, d_min=1, d_max=1, q_max=0, on_log=lines.append)
    assert sum(line.startswith("[GRID] (") for line in lines) == 2
    assert lines[-1].startswith("[GRID] best_aic=")


# ============================================================
# ESTIMATION
# ============================================================

def _gaussian_loglik(resid: np.ndarray, variances: np.ndarray) -> float:
    return float(-0.5 * np.sum(np.log(2.0 * np.pi * variances) + resid * resid / variances))


def _ar_start_covariance(phi) -> np.ndarray:
    """Stationary covariance of the first p values, unit innovation variance."""
    if len(phi) == 1:
        return np.array([[1.0 / (1.0 - phi[0] ** 2)]])
    phi1, phi2 = phi
    g0 = (1.0 - phi2) / ((1.0 + phi2) * ((1.0 - phi2) ** 2 - phi1 ** 2))
    return toeplitz([g0, phi1 / (1.0 - phi2) * g0])


@pytest.mark.parametrize("ar", [(0.6,), (0.5, -0.3)])
def test_exact_likelihood_is_css_plus_start_density(ar):
    # Prediction-error decomposition: exact = density of the first p values + conditional (css) part.
    x = simulate_arma(300, ar=ar, seed=4)
    phi, theta, sigma2 = np.array(ar), np.zeros(0), 1.3
    v, F, _ = kalman_innovations(x, phi, theta)
    exact = _gaussian_loglik(v, sigma2 * F)
    e = css_residuals(x, phi, theta)
    css = _gaussian_loglik(e, np.full(e.size, sigma2))
    p = phi.size
    start = multivariate_normal(mean=np.zeros(p), cov=sigma2 * _ar_start_covariance(ar)).logpdf(x[:p])
    assert exact - float(start) == pytest.approx(css, abs=1e-6)


def test_css_and_exact_agree_on_long_ar1():
    series = make_series(simulate_arma(2000, ar=(0.6,), mu=2.0, seed=3), first_year=1)
    exact = fit(series, ArimaOrder(1, 0, 0), drift=True, method="exact-mle")
    css = fit(series, ArimaOrder(1, 0, 0), drift=True, method="css")
    assert exact.ar[0] == pytest.approx(0.6, abs=0.05)
    assert css.ar[0] == pytest.approx(exact.ar[0], abs=1e-3)
    assert css.mu == pytest.approx(exact.mu, abs=1e-2)
    assert css.n_eff == 1999 and exact.n_eff == 2000


def test_white_noise_closed_form():
    values = [0.5, -1.0, 2.0, 0.25, -0.75, 1.5, -0.5, 0.0]
    result = fit(make_series(values), ArimaOrder(0, 0, 0), drift=False)
    sigma2 = float(np.mean(np.square(values)))
    assert result.mu == 0.0
    assert result.sigma2 == pytest.approx(sigma2)
    assert result.loglik == pytest.approx(-0.5 * 8 * (math.log(2.0 * math.pi) + math.log(sigma2) + 1.0))
    assert result.k == 1
    assert result.aic == pytest.approx(-2.0 * result.loglik + 2.0)


def test_unconverged_fit_raises():
    series = make_series(simulate_arma(200, ar=(0.6,), seed=8), first_year=1800)
    with pytest.raises(ConvergenceError):
        fit(series, ArimaOrder(1, 0, 0), drift=True, options=_ONE_STEP)


def test_grid_ranks_unconverged_fits_last():
    series = make_series(simulate_arma(200, ar=(0.6,), seed=8), first_year=1800)
    grid = grid_search(series, p_max=1, d_max=0, q_max=0, drift="always", options=_ONE_STEP)
    assert [c.status for c in grid.candidates] == ["ok", "failed:ConvergenceError"]
    assert grid.candidates[-1].order == ArimaOrder(1, 0, 0)
    assert grid.best_aic == ArimaOrder(0, 0, 0)


def _bfgs_result(fun: float, success: bool, status: int = 0, grad: float = 1e-7) -> OptimizeResult:
    return OptimizeResult(fun=fun, success=success, status=status, jac=np.array([grad]),
                          x=np.zeros(1), message="")


def test_precision_loss_accepted_only_at_small_gradient():
    options = FitOptions()
    assert _converged(_bfgs_result(1.0, True), options)
    assert _converged(_bfgs_result(1.0, False, status=2, grad=1e-5), options)
    assert not _converged(_bfgs_result(1.0, False, status=2, grad=0.5), options)
    assert not _converged(_bfgs_result(1.0, False, status=1), options)


def test_converged_result_replaces_equal_unconverged_one():
    options = FitOptions()
    stalled = _bfgs_result(10.0, False, status=1)
    done = _bfgs_result(10.0 + 1e-12, True)
    assert _better(done, stalled, options)
    assert not _better(stalled, done, options)
    assert _better(_bfgs_result(9.0, False, status=1), done, options)


def test_every_grid_fit_satisfies_criteria_identities(gdp_sub):
    grid = grid_search(gdp_sub, p_max=1, d_max=2, q_max=1, drift="auto")
    assert grid.fits
    for order, result in grid.fits.items():
        k = parameter_count(order, result.drift)
        assert result.aic == pytest.approx(-2.0 * result.loglik + 2.0 * k)
        assert result.bic == pytest.approx(-2.0 * result.loglik + k * math.log(result.n_eff))
        assert information_criteria(result) == (result.aic, result.bic)
        assert result.bic - result.aic == pytest.approx(k * (math.log(result.n_eff) - 2.0))


def test_ma1_is_invertible():
    series = make_series(simulate_arma(300, ma=(0.5,), seed=9), first_year=1700)
    result = fit(series, ArimaOrder(0, 0, 1), drift=True)
    assert abs(result.ma[0]) < 1.0
    assert result.ma[0] == pytest.approx(0.5, abs=0.15)


def test_linear_series_is_degenerate():
    result = fit(make_series(range(30)), ArimaOrder(0, 1, 0), drift=True)
    assert result.degenerate
    assert result.sigma2 == 0.0
    assert result.aic == -math.inf
    table = forecast(result, 3)
    assert table.degenerate
    assert all(row.lower == row.point == row.upper for row in table.rows)
    assert table.point_at(2032) == pytest.approx(32.0)


def test_too_few_values():
    with pytest.raises(InsufficientDataError):
        fit(make_series([1.0, 2.0, 4.0, 3.0, 5.0]), ArimaOrder(1, 1, 1))


def test_forecast_arguments(fx):
    result = fit(fx, ArimaOrder(0, 1, 0), drift=True)
    with pytest.raises(ParameterError):
        forecast(result, 0)
    with pytest.raises(ParameterError):
        forecast(result, 3, variance="robust")
    with pytest.raises(ParameterError):
        forecast(result, 3, level=100)


def _shift_register_noise(bits: int = 9) -> np.ndarray:
    """±1 maximal-length sequence (x^9 + x^5 + 1): sample autocorrelations near zero at every lag."""
    state = [1] * bits
    out = []
    for _ in range(2 ** bits - 1):
        out.append(1.0 if state[-1] else -1.0)
        state = [state[8] ^ state[4]] + state[:-1]
    return np.array(out)


def test_white_noise_selects_constant_mean():
    series = make_series(5.0 + _shift_register_noise(), first_year=1500)
    assert len(series) == 511
    assert auto_select(series) == ArimaOrder(0, 0, 0)


def test_random_walk_selects_first_difference():
    steps = 2.0 + simulate_arma(200, seed=23)
    series = make_series(np.cumsum(steps), first_year=1800)
    assert auto_select(series).d == 1


def test_second_difference_ma_forecast_has_constant_increments(gdp_sub):
    table = forecast(fit(gdp_sub, ArimaOrder(0, 2, 1)), 22)
    increments = np.diff(table.points)
    assert np.allclose(increments, increments[0], rtol=1e-9, atol=0.0)


def test_grid_does_not_depend_on_evaluation_order(fx):
    lattice = [ArimaOrder(p, d, q) for d in range(2) for p in range(2) for q in range(2)]
    shuffled = list(lattice)
    np.random.default_rng(31).shuffle(shuffled)
    assert shuffled != lattice
    ordered = grid_search(fx, orders=lattice, drift="auto")
    reordered = grid_search(fx, orders=shuffled, drift="auto")
    assert [(c.order, c.status) for c in ordered.candidates] == [(c.order, c.status) for c in reordered.candidates]
    assert [c.aic for c in ordered.candidates if c.ok] == [c.aic for c in reordered.candidates if c.ok]
    assert (ordered.best_aic, ordered.best_bic) == (reordered.best_aic, reordered.best_bic)

def test_forecast_table_csv(fx, tmp_path):
    table = forecast(fit(fx, ArimaOrder(0, 1, 0), drift=True), 2, level=90)
    lines = table.to_csv(tmp_path / "f.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "year,forecast,lower_90,upper_90"
    assert lines[1].startswith("2025,84.209")


def test_auto_fit_refits_selected_order_with_requested_drift(fx):
    lines = []
    chosen = auto_fit(fx)
    driftless = auto_fit(fx, drift=False, on_log=lines.append)
    assert (chosen.order, chosen.drift) == (ArimaOrder(0, 1, 0), True)
    assert (driftless.order, driftless.drift) == (ArimaOrder(0, 1, 0), False)
    assert driftless.mu == 0.0
    assert lines[-1] == "[STEPWISE] re-fit (0, 1, 0) with drift=off"
    assert auto_fit(fx, drift=True).mu == pytest.approx(chosen.mu)
