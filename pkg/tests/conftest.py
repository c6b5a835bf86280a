import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.core.series_store import AnnualSeries, DatasetCatalog


@pytest.fixture(scope="session")
def catalog() -> DatasetCatalog:
    return DatasetCatalog.bundled()


@pytest.fixture(scope="session")
def fx(catalog) -> AnnualSeries:
    return catalog.get("exchange_rate_1971_2024")


@pytest.fixture(scope="session")
def gdp(catalog) -> AnnualSeries:
    return catalog.get("gdp_rs_crore_1971_2025")


@pytest.fixture(scope="session")
def gdp_sub(gdp) -> AnnualSeries:
    return gdp.slice(1991, 2025)


def make_series(values, first_year: int = 2000, name: str = "test", unit: str = "usd") -> AnnualSeries:
    return AnnualSeries(name=name, unit=unit, first_year=first_year, values=tuple(float(v) for v in values))


def simulate_arma(n: int, ar=(), ma=(), mu: float = 0.0, seed: int = 7, burn: int = 200) -> np.ndarray:
    rng = np.random.default_rng(seed)
    e = rng.standard_normal(n + burn)
    x = np.zeros(n + burn)
    for t in range(n + burn):
        value = e[t]
        for i, phi in enumerate(ar, start=1):
            if t - i >= 0:
                value += phi * x[t - i]
        for j, theta in enumerate(ma, start=1):
            if t - j >= 0:
                value += theta * e[t - j]
        x[t] = value
    return mu + x[burn:]
