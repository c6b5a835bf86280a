# Report emission: tables, plots, reproduction checks
from .tables import (
    ReportDocument, ReportSection, unit_root_csv, unit_root_markdown, grid_markdown,
    forecast_markdown, correlogram_markdown, scenario_markdown, write_json,
)
from .plots import PLOT_KINDS, emit_plot
from .verification import VerificationReport, run_verification

__all__ = [
    'ReportDocument', 'ReportSection', 'unit_root_csv', 'unit_root_markdown', 'grid_markdown',
    'forecast_markdown', 'correlogram_markdown', 'scenario_markdown', 'write_json',
    'PLOT_KINDS', 'emit_plot',
    'VerificationReport', 'run_verification',
]
