"""
Table utilities for sdwbound
CSV writing with a fixed number format, schema checks and reference-series loading
"""

import math
import os
from dataclasses import dataclass

import numpy as np
import pandas as pd

from ..errors import SchemaError

# 12 significant digits
FLOAT_FORMAT = '%.11e'
TRUNCATION_MARKER = '# truncated'

SCAN_COLUMNS = ['r_s', 'h', 'eps_star', 'eps0', 'eps_ratio', 'delta_e_fg', 'delta_e_sdw',
                'delta_e_total', 'scaled_energy', 'iterations', 'residual']
SCAN_EXTRA_COLUMNS = ['scaled_asym', 'energy_ratio', 'delta_e_jellium', 'no_sdw', 'warnings', 'error']
FG_COLUMNS = ['r_s', 'eps', 'h', 'delta_e_fg_leading', 'delta_e_fg_quad', 'quad_error', 'flag']
PROFILE_COLUMNS = ['x', 'xi', 'b_sq', 'weight']

PLOT_SCHEMAS = {
    'fg_cost': ['eps', 'h', 'delta_e_fg_leading'],
    'scaled_energy': ['r_s', 'scaled_energy'],
    'eps_ratio': ['r_s', 'eps_ratio'],
    'h_ratio': ['r_s', 'h', 'delta_e_total'],
    'profile': ['x', 'xi'],
}

# short names accepted for the r_s and fg plots
PLOT_KIND_ALIASES = {'fig2': 'fg_cost', 'fig3': 'scaled_energy', 'fig4': 'eps_ratio', 'fig5': 'h_ratio'}

REFERENCE_KINDS = ('scaled_energy', 'eps_ratio', 'energy_ratio')


@dataclass(frozen=True)
class ReferenceSeries:
    """User-supplied points (r_s, value) drawn on top of a plot"""
    label: str
    r_s: tuple
    values: tuple
    kind: str = 'scaled_energy'


def write_table(df, path, truncated=False):
    """
    Write a DataFrame as CSV with '.' decimals and 12 significant digits

    Args:
        df (pandas.DataFrame): Table to write
        path (str): Output file
        truncated (bool): Append the truncation marker after the last row
    """
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    if truncated:
        with open(path, 'a', encoding='utf-8') as f:
            f.write(f"{TRUNCATION_MARKER}\n")


def read_table(path):
    """
    Read a CSV written by write_table, ignoring the truncation marker

    Returns:
        pandas.DataFrame: The table
    """
    if not os.path.exists(path):
        raise SchemaError(f"Input file not found: {path}")
    try:
        return pd.read_csv(path, comment='#')
    except pd.errors.EmptyDataError:
        raise SchemaError(f"{path} has no header row")


def check_columns(df, required, source='table'):
    """
    Raise SchemaError unless every required column is present

    Args:
        df (pandas.DataFrame): Table to check
        required (list): Column names
        source (str): Name used in the error message
    """
    missing = [c for c in required if c not in df.columns]
    if missing:
        raise SchemaError(f"{source} is missing columns: {', '.join(missing)}")


def scan_frame(rows, sdw_count=1):
    """
    Scan rows as a DataFrame with the documented column order

    energy_ratio is Delta E(h) / Delta E(h = 0) at the same r_s when an h = 0 row
    exists. delta_e_jellium multiplies the total by the number of SDWs.

    Args:
        rows (list): ScanRow entries
        sdw_count (int): Number of superposed SDWs

    Returns:
        pandas.DataFrame: One line per row
    """
    df = pd.DataFrame([row.as_dict() for row in rows])
    for column in SCAN_COLUMNS + SCAN_EXTRA_COLUMNS:
        if column not in df.columns:
            df[column] = np.nan if column not in ('warnings', 'error') else ''
    if len(df):
        flat = df[df['h'] == 0].drop_duplicates('r_s').set_index('r_s')['delta_e_total']
        df['energy_ratio'] = df['delta_e_total'] / df['r_s'].map(flat)
        df['delta_e_jellium'] = sdw_count * df['delta_e_total']
    df['warnings'] = df['warnings'].fillna('')
    df['error'] = df['error'].fillna('')
    return df[SCAN_COLUMNS + SCAN_EXTRA_COLUMNS]


def load_reference(path, kind='scaled_energy'):
    """
    Load reference series from a CSV with columns label,r_s,value

    Args:
        path (str): CSV file
        kind (str): What the values represent

    Returns:
        list: ReferenceSeries, one per label, sorted by label
    """
    if kind not in REFERENCE_KINDS:
        raise SchemaError(f"Unknown reference kind {kind!r}")
    df = read_table(path)
    check_columns(df, ['label', 'r_s', 'value'], source=path)
    df = clean_reference(df, source=path)

    series = []
    for label, group in df.groupby('label', sort=False):
        series.append(ReferenceSeries(label=str(label), r_s=tuple(group['r_s']),
                                      values=tuple(group['value']), kind=kind))
    return series


def clean_reference(df, source='reference'):
    """
    Validate reference rows: r_s > 0 and finite values

    Args:
        df (pandas.DataFrame): Raw rows
        source (str): Name used in error messages

    Returns:
        pandas.DataFrame: Rows sorted by r_s within each label
    """
    df = df.dropna(subset=['label'])
    r_s = pd.to_numeric(df['r_s'], errors='coerce')
    value = pd.to_numeric(df['value'], errors='coerce')
    if not np.all(np.isfinite(r_s)) or not np.all(np.isfinite(value)):
        raise SchemaError(f"{source}: r_s and value must be finite numbers")
    if (r_s <= 0).any():
        raise SchemaError(f"{source}: r_s must be positive")
    df = df.assign(r_s=r_s, value=value)
    return df.sort_values(['label', 'r_s'], kind='stable')


def finite_or_none(value):
    """JSON-friendly float: NaN and inf become None"""
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None
