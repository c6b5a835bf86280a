#!/usr/bin/env python3
"""
RUN LOGGER
==========
Run log for CLI invocations plus a per-run fit-metrics file.

Log file:     <log_dir>/forecast_run.log      (blocks prefixed [RUN][CATEGORY])
Metrics file: <log_dir>/metrics/fits_<run_id>.jsonl (one record per fitted model)

Lifecycle order:
  START -> COMMAND -> FIT* -> (optional) ERROR -> STOP

Logs never go to the output directory; emitted artifacts stay identical
across runs.
"""

import json
import math
from dataclasses import asdict, dataclass
from datetime import datetime
from pathlib import Path
from typing import Optional


@dataclass
class FitRecord:
    """One fitted candidate."""
    run_id: str = ""
    series: str = ""
    p: int = 0
    d: int = 0
    q: int = 0
    drift: bool = False
    method: str = ""
    loglik: Optional[float] = None
    aic: Optional[float] = None
    bic: Optional[float] = None
    status: str = ""


def _finite_or_none(value) -> Optional[float]:
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


class RunLogger:
    """
    Run logger. When disabled every call is a silent no-op.
    """

    def __init__(self, log_dir: str = "logs", enabled: bool = True, run_id: Optional[str] = None):
        self.enabled = enabled
        self.log_dir = Path(log_dir)
        self.run_id = run_id or datetime.now().strftime("%Y%m%d_%H%M%S")
        self.log_file: Optional[Path] = None
        self.metrics_file: Optional[Path] = None
        self._fit_count: int = 0
        self._error_count: int = 0

        if self.enabled:
            self._init_files()

    def _init_files(self):
        (self.log_dir / "metrics").mkdir(parents=True, exist_ok=True)
        self.log_file = self.log_dir / "forecast_run.log"
        self.metrics_file = self.log_dir / "metrics" / f"fits_{self.run_id}.jsonl"

    def _write(self, category: str, data: dict):
        if not self.enabled:
            return

        timestamp = datetime.now().strftime("%Y-%m-%d %H:%M:%S.%f")[:-3]
        lines = [f"[RUN][{category}]", f"time={timestamp}", f"run_id={self.run_id}"]
        for key, value in data.items():
            if isinstance(value, bool):
                lines.append(f"{key}={str(value).lower()}")
            elif isinstance(value, float):
                lines.append(f"{key}={value:.6f}")
            else:
                lines.append(f"{key}={value}")

        with open(self.log_file, "a", encoding="utf-8") as f:
            f.write("\n".join(lines) + "\n\n")
            f.flush()

    # =========================================================================
    # LIFECYCLE LOGS
    # =========================================================================

    def log_start(self, argv: list, config: dict):
        self._write("START", {
            "argv": " ".join(argv),
            "config_snapshot": json.dumps(config, default=str, sort_keys=True),
        })

    def log_command(self, command: str, params: dict):
        self._write("COMMAND", {"command": command, **params})

    def log_fit(self, series: str, order: tuple, drift: bool, method: str,
                loglik=None, aic=None, bic=None, status: str = "ok"):
        """Log one fitted candidate and append it to the metrics file."""
        if not self.enabled:
            return
        self._fit_count += 1
        record = FitRecord(
            run_id=self.run_id, series=series,
            p=order[0], d=order[1], q=order[2], drift=drift, method=method,
            loglik=_finite_or_none(loglik), aic=_finite_or_none(aic), bic=_finite_or_none(bic),
            status=status,
        )
        self._write("FIT", {
            "series": series,
            "order": f"({order[0]}, {order[1]}, {order[2]})",
            "drift": drift,
            "aic": record.aic if record.aic is not None else "nan",
            "status": status,
        })
        with open(self.metrics_file, "a", encoding="utf-8") as f:
            f.write(json.dumps(asdict(record)) + "\n")

    def log_error(self, message: str):
        self._error_count += 1
        self._write("ERROR", {"message": message})

    def log_stop(self, exit_code: int):
        self._write("STOP", {
            "exit_code": exit_code,
            "fits": self._fit_count,
            "errors": self._error_count,
        })


# =============================================================================
# SINGLETON INSTANCE
# =============================================================================

_run_logger: Optional[RunLogger] = None


def init_run_logger(log_dir: str = "logs", enabled: bool = True, run_id: Optional[str] = None) -> RunLogger:
    global _run_logger
    _run_logger = RunLogger(log_dir=log_dir, enabled=enabled, run_id=run_id)
    return _run_logger


def get_run_logger() -> Optional[RunLogger]:
    return _run_logger


# =============================================================================
# CONVENIENCE FUNCTIONS
# =============================================================================

def run_log_start(argv: list, config: dict):
    if _run_logger:
        _run_logger.log_start(argv, config)


def run_log_command(command: str, params: dict):
    if _run_logger:
        _run_logger.log_command(command, params)


def run_log_fit(series: str, order: tuple, drift: bool, method: str,
                loglik=None, aic=None, bic=None, status: str = "ok"):
    if _run_logger:
        _run_logger.log_fit(series, order, drift, method, loglik, aic, bic, status)


def run_log_error(message: str):
    if _run_logger:
        _run_logger.log_error(message)


def run_log_stop(exit_code: int):
    if _run_logger:
        _run_logger.log_stop(exit_code)


# ============================================================
# CLI ANALYSIS
# ============================================================

def summarize(filepath: str):
    """Print the fits of one metrics file, best AIC first."""
    path = Path(filepath)
    if not path.exists():
        print(f"Not found: {filepath}")
        return

    with open(path, encoding="utf-8") as f:
        fits = [json.loads(line) for line in f if line.strip()]
    if not fits:
        print("No fits")
        return

    ok = sorted((r for r in fits if r["status"] == "ok"), key=lambda r: r["aic"])
    print("=" * 60)
    print(f"  FITS: {path.name}")
    print("=" * 60)
    print(f"  Candidates: {len(fits)} | ok: {len(ok)} | other: {len(fits) - len(ok)}")
    print()
    print(f"  {'Series':<26} {'Order':<10} {'AIC':>12} {'BIC':>12}")
    print(f"  {'-' * 62}")
    for r in ok[:10]:
        order = f"({r['p']},{r['d']},{r['q']}){'+c' if r['drift'] else ''}"
        print(f"  {r['series'][:26]:<26} {order:<10} {r['aic']:>12.4f} {r['bic']:>12.4f}")
    print("=" * 60)


if __name__ == '__main__':
    import sys
    if len(sys.argv) > 1:
        summarize(sys.argv[1])
    else:
        print("Usage: python -m src.core.run_logger <fits_file.jsonl>")
