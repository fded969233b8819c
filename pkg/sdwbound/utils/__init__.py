"""
sdwbound Utilities Package
Contains validation, table, report and plot helpers shared by the solver modules and the CLI
"""

from .data_utils import load_reference, read_table, scan_frame, write_table
from .plot_utils import render_plot
from .report_utils import create_summary, save_profile, save_summary
from .validation_utils import parse_float_list, parse_grid_spec, require, validate_deformation

__all__ = [
    'load_reference',
    'read_table',
    'scan_frame',
    'write_table',
    'render_plot',
    'create_summary',
    'save_profile',
    'save_summary',
    'parse_float_list',
    'parse_grid_spec',
    'require',
    'validate_deformation',
]
