# Command-line front end
from .config import RunConfig, load_scenario, parse_scenario, resolve_data
from .main import cli, run_cli

__all__ = ['RunConfig', 'load_scenario', 'parse_scenario', 'resolve_data', 'cli', 'run_cli']
