"""
ADF SIZE / POWER STUDY
======================

How often does the zero-lag ADF test (constant, 5%) reject a unit root
at the sample sizes of the bundled series?

  size:  random walks y_t = y_{t-1} + e_t        (should reject ~5%)
  power: AR(1) y_t = rho * y_{t-1} + e_t, rho < 1 (higher is better)

Both table-interpolated and response-surface critical values are scored.
"""

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.core.series_store import AnnualSeries
from src.core.unit_root import adf_test, critical_values

# Simulation parameters
N_SIMULATIONS = 2000
SAMPLE_SIZES = [35, 54, 100]
RHOS = [1.0, 0.95, 0.9, 0.8, 0.5]
BURN_IN = 50
SEED = 42


def simulate_ar1(rho: float, n: int, rng: np.random.Generator) -> np.ndarray:
    e = rng.standard_normal(n + BURN_IN)
    y = np.empty_like(e)
    y[0] = e[0]
    for t in range(1, e.size):
        y[t] = rho * y[t - 1] + e[t]
    return y[BURN_IN:]


def rejection_rates(rho: float, n: int, n_sims: int = N_SIMULATIONS, seed: int = SEED) -> dict:
    """Share of paths whose Z(t) falls below each 5% critical value."""
    rng = np.random.default_rng(seed)
    cv_table = critical_values("constant", n - 1, source="table")[1]
    cv_surface = critical_values("constant", n - 1, source="surface")[1]
    stats = np.empty(n_sims)
    for i in range(n_sims):
        series = AnnualSeries("sim", "usd", 1, tuple(simulate_ar1(rho, n, rng)))
        stats[i] = adf_test(series).z_t
    return {
        "rho": rho,
        "n": n,
        "reject_table": float(np.mean(stats < cv_table)),
        "reject_surface": float(np.mean(stats < cv_surface)),
        "median_z_t": float(np.median(stats)),
    }


def print_results_table(results):
    print("\n" + "=" * 72)
    print("ADF (constant, 0 lags) REJECTION RATES AT 5%")
    print("=" * 72)
    print(f"Simulations: {N_SIMULATIONS:,} per cell, seed {SEED}")
    print("-" * 72)
    print(f"{'rho':>6} | {'n':>5} | {'table CV':>10} | {'surface CV':>10} | {'median Z(t)':>12}")
    print("-" * 72)
    for r in results:
        print(f"{r['rho']:>6.2f} | {r['n']:>5} | {r['reject_table']*100:>9.1f}% | "
              f"{r['reject_surface']*100:>9.1f}% | {r['median_z_t']:>12.3f}")
    print("=" * 72)


def main():
    print(f"Running Monte Carlo ({N_SIMULATIONS:,} paths per cell)...")
    results = []
    for n in SAMPLE_SIZES:
        for rho in RHOS:
            print(f"  Simulating: n={n}, rho={rho}...")
            results.append(rejection_rates(rho, n))
    print_results_table(results)


if __name__ == "__main__":
    main()
