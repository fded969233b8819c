"""
Report utilities for sdwbound
Writes solution profiles, grid dumps and JSON summaries of single solves
"""

import json
import logging
import os

import pandas as pd

from .data_utils import PROFILE_COLUMNS, finite_or_none, write_table

logger = logging.getLogger(__name__)


def profile_frame(result):
    """
    Converged amplitude on the grid as a DataFrame

    Args:
        result (SolveResult): Output of solver.solve

    Returns:
        pandas.DataFrame: Columns x, xi, b_sq, weight
    """
    return pd.DataFrame({
        'x': result.grid.nodes,
        'xi': result.solution.xi,
        'b_sq': result.solution.b_sq,
        'weight': result.grid.weights,
    })[PROFILE_COLUMNS]


def save_profile(result, path):
    """
    Save the x, xi, b_sq profile (with quadrature weights) as CSV

    Args:
        result (SolveResult): Output of solver.solve
        path (str): Output file
    """
    write_table(profile_frame(result), path)
    logger.info("✅ Profile saved to %s", path)


def create_summary(report, result=None, sdw_count=1):
    """
    JSON-ready summary mirroring the EnergyReport field names

    Args:
        report (EnergyReport): Energies of the point
        result (SolveResult): Optional solve for grid and bound details
        sdw_count (int): Number of superposed SDWs for delta_e_jellium

    Returns:
        dict: Summary
    """
    summary = {}
    for key, value in report.as_dict().items():
        summary[key] = finite_or_none(value) if isinstance(value, float) else value
    summary['sdw_count'] = sdw_count
    summary['delta_e_jellium'] = finite_or_none(sdw_count * report.delta_e_total)

    if result is not None:
        summary['grid'] = {
            'points': result.grid.size,
            'x_min': result.grid.x_min,
            'x_max': result.grid.x_max,
            'points_per_decade': result.grid.points_per_decade,
            'tail_bound': result.grid.tail_bound,
            'extensions': result.extensions,
        }
        summary['bound'] = {
            'delta_e_scaled': result.energy.delta_e_scaled,
            'delta_e_full': result.energy.delta_e_full,
            'gap_term': result.energy.gap_term,
            'exchange_term': result.energy.exchange_term,
            'neglected_term': result.energy.neglected_term,
        }
    return summary


def save_summary(summary, path):
    """
    Write a summary dict as JSON with sorted keys

    Args:
        summary (dict): Output of create_summary
        path (str): Output file
    """
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write('\n')
    logger.info("✅ Summary saved to %s", path)
