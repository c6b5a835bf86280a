#!/usr/bin/env python3
"""
Reproduction Verification Suite
===============================
Must pass ALL critical checks before publishing regenerated tables.

Run: python scripts/verify_reproduction.py
"""

import os
import sys
from datetime import datetime
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from dotenv import load_dotenv
load_dotenv(Path(__file__).parent.parent / ".env")

from src.core.series_store import DatasetCatalog, data_dir
from src.report.verification import run_verification


def main() -> int:
    print(f"  Time: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
    print(f"  Data: {data_dir()}")

    report = run_verification(DatasetCatalog.bundled(), workers=int(os.getenv("FORECAST_WORKERS", "1")))

    # Print logs if any failures
    if not report.passed:
        print()
        print("Search logs:")
        for log in report.logs[-20:]:
            print(f"  {log}")

    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
