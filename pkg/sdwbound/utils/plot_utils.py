"""
Plot utilities for sdwbound
Renders scan and profile tables as standalone SVG files with matplotlib
"""

import logging
import os

import matplotlib
import pandas as pd
matplotlib.use('Agg')
from matplotlib.figure import Figure

from .data_utils import PLOT_KIND_ALIASES, PLOT_SCHEMAS, check_columns

logger = logging.getLogger(__name__)

PLOT_KINDS = tuple(PLOT_SCHEMAS) + tuple(PLOT_KIND_ALIASES)
ASYMPTOTIC_SCALED_ENERGY = -0.115
SMALL_RS_ENERGY_RATIO = 16.0

# fixed ids and no timestamp so repeated runs give identical files
SVG_RC = {'svg.hashsalt': 'sdwbound', 'svg.fonttype': 'none'}


def _numeric(df, columns):
    df = df.assign(**{c: pd.to_numeric(df[c], errors='coerce') for c in columns})
    return df.dropna(subset=columns).sort_values(columns[0], kind='stable')


def _scaled_energy(ax, df):
    data = _numeric(df, ['r_s', 'scaled_energy'])
    if 'h' in data.columns and (data['h'] == 0.5).any():
        data = data[data['h'] == 0.5]
    ax.plot(data['r_s'], data['scaled_energy'], 'o-', label='upper bound')
    ax.axhline(ASYMPTOTIC_SCALED_ENERGY, linestyle='-.', color='k', label='small r_s limit')
    ax.set_xscale('log')
    ax.set_xlabel('r_s')
    ax.set_ylabel('ΔE r_s² / ε³')


def _eps_ratio(ax, df):
    data = _numeric(df, ['r_s', 'eps_ratio'])
    if 'h' in data.columns and (data['h'] == 0.5).any():
        data = data[data['h'] == 0.5]
    ax.plot(data['r_s'], data['eps_ratio'], 's-', label='ε* / ε₀')
    ax.axhline(1.0, linestyle=':', color='k')
    ax.set_xscale('log')
    ax.set_xlabel('r_s')
    ax.set_ylabel('ε / ε₀')


def _h_ratio(ax, df):
    data = _numeric(df, ['r_s', 'h', 'delta_e_total'])
    table = data.pivot_table(index='r_s', columns='h', values='delta_e_total', aggfunc='first') \
        if len(data) else None
    if table is not None and 0.0 in table.columns and 0.5 in table.columns:
        ratio = (table[0.5] / table[0.0]).dropna()
        ax.plot(ratio.index, ratio.values, 'o-', label='ΔE(h=1/2) / ΔE(h=0)')
    ax.axhline(SMALL_RS_ENERGY_RATIO, linestyle=':', color='k', label='small r_s limit')
    ax.set_xscale('log')
    ax.set_yscale('log')
    ax.set_xlabel('r_s')
    ax.set_ylabel('energy ratio')


def _fg_cost(ax, df):
    data = _numeric(df, ['eps', 'h', 'delta_e_fg_leading'])
    for eps, curve in data.groupby('eps', sort=True):
        curve = curve.sort_values('h', kind='stable')
        line, = ax.plot(curve['h'], curve['delta_e_fg_leading'], '-', label=f'ε={eps:g} leading order')
        if 'delta_e_fg_quad' in curve.columns:
            quad = curve.dropna(subset=['delta_e_fg_quad'])
            ax.plot(quad['h'], quad['delta_e_fg_quad'], 'o', color=line.get_color(),
                    label=f'ε={eps:g} quadrature')
    ax.set_xlabel('h')
    ax.set_ylabel('ΔE_FG (Hartree)')


def _profile(ax, df):
    data = _numeric(df, ['x', 'xi'])
    ax.plot(data['x'], data['xi'], '-', label='ξ')
    if 'b_sq' in data.columns:
        ax.plot(data['x'], data['b_sq'], '--', label='b²')
    ax.set_xscale('log')
    ax.set_xlabel('x')
    ax.set_ylabel('amplitude')


DRAWERS = {'fg_cost': _fg_cost, 'scaled_energy': _scaled_energy, 'eps_ratio': _eps_ratio,
           'h_ratio': _h_ratio, 'profile': _profile}


def render_plot(df, kind, path, references=()):
    """
    Draw one figure kind from a table and save it as SVG

    Args:
        df (pandas.DataFrame): Scan, fg or profile table
        kind (str): One of fg_cost, scaled_energy, eps_ratio, h_ratio, profile,
            or one of the fig2..fig5 aliases
        path (str): Output SVG file
        references (list): ReferenceSeries drawn as open markers (r_s axes only)
    """
    kind = PLOT_KIND_ALIASES.get(kind, kind)
    check_columns(df, PLOT_SCHEMAS[kind], source=f"{kind} input")

    with matplotlib.rc_context(SVG_RC):
        fig = Figure(figsize=(6.4, 4.8))
        ax = fig.add_subplot()
        DRAWERS[kind](ax, df)
        if kind in ('scaled_energy', 'eps_ratio', 'h_ratio'):
            for series in references:
                ax.plot(series.r_s, series.values, 'D', fillstyle='none', label=series.label)
        if ax.get_legend_handles_labels()[0]:
            ax.legend(fontsize='small')
        fig.tight_layout()

        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        fig.savefig(path, format='svg', metadata={'Date': None})
    logger.info("📊 %s plot saved to %s", kind, path)
