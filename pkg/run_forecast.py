#!/usr/bin/env python3
"""
Forecast Toolkit - CLI entry
============================
Loads .env, then runs one command.

Usage:
  python run_forecast.py unitroot --data catalog:exchange_rate_1971_2024 --test both --diff 1
  python run_forecast.py forecast --data catalog:exchange_rate_1971_2024 --order 0,1,0 --drift --horizon 23
  python run_forecast.py reproduce-paper --out out
"""
import sys
from pathlib import Path

# Load environment from .env (existing variables win)
from dotenv import load_dotenv
load_dotenv(Path(__file__).parent / ".env")

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

if __name__ == "__main__":
    from src.cli.main import run_cli

    sys.exit(run_cli(sys.argv[1:]))
