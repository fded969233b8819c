"""
sdwbound command-line interface

    sdwbound constants
    sdwbound solve --rs 3 --eps 2e-3 --h 0.5
    sdwbound optimize --rs 1 --h 0.5
    sdwbound scan --rs-list 0.01,0.1,1 --h-list 0,0.5 --out scan.csv
    sdwbound fg --rs 4 --eps-list 0.05,0.1,0.2 --h-grid 0:1:21
    sdwbound plot --in scan.csv --kind scaled_energy --out scaled_energy.svg

Exit codes: 0 success, 1 usage or domain error, 2 numerical failure.
"""

import functools
import logging
import math
import os
import sys

import click
import pandas as pd
from tqdm import tqdm

from . import __version__
from .asymptotics import C_CONSTANT, scaled_constant
from .config import load_config
from .errors import QuadratureError, SdwBoundError
from .fermi_gas import delta_e_fg_leading, delta_e_fg_quadrature, MIN_QUADRATURE_EPS, optimal_h
from .optimizer import energy_report, iter_scan, kgrid_resolves, optimize_epsilon, sort_rows, ScanRow
from .params import constants, deformation
from .solver import solve
from .utils import (create_summary, load_reference, parse_float_list, parse_grid_spec, read_table,
                    render_plot, save_profile, save_summary, scan_frame, write_table)
from .utils.data_utils import FG_COLUMNS
from .utils.plot_utils import PLOT_KINDS

logger = logging.getLogger(__name__)


def report_errors(command):
    """Turn SdwBoundError into a stderr message and the error's exit code"""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except SdwBoundError as e:
            click.echo(f"❌ {type(e).__name__}: {e}", err=True)
            raise click.exceptions.Exit(e.exit_code)
    return wrapper


def _config(ctx, **overrides):
    """RunConfig from defaults, SDW_BOUND_CONFIG, --config and the command's flags"""
    return load_config(ctx.obj.get('config_path'), overrides)


def _out_path(config, out, default_name):
    return out if out else os.path.join(config.run.out_dir, default_name)


@click.group()
@click.version_option(__version__, prog_name='sdwbound')
@click.option('--config', 'config_path', type=click.Path(), default=None,
              help='key = value config file (overrides SDW_BOUND_CONFIG)')
@click.option('-v', '--verbose', count=True, help='-v for INFO, -vv for DEBUG')
@click.pass_context
def cli(ctx, config_path, verbose):
    """Hartree-Fock upper bounds on spin-density-wave energies of jellium"""
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s',
                        stream=sys.stderr, force=True)
    ctx.ensure_object(dict)
    ctx.obj['config_path'] = config_path


@cli.command('constants')
@click.pass_context
@report_errors
def cmd_constants(ctx):
    """Print the model constants"""
    _config(ctx)
    c = constants()
    click.echo("📊 Model constants")
    click.echo(f"a_V = {c.a_V:.7f}")
    click.echo(f"a_K = {c.a_K:.7f}")
    click.echo(f"a_K/a_V = {c.ratio_KV:.1f} ({c.ratio_KV:.6f})")
    click.echo(f"C = {C_CONSTANT:.3f} ({C_CONSTANT:.6f})")
    click.echo(f"scaled constant = {scaled_constant(0.5):.3f} ({scaled_constant(0.5):.6f})")


def _solver_options(command):
    command = click.option('--ppd', type=int, default=None, help='grid.points_per_decade')(command)
    command = click.option('--tol', type=float, default=None, help='solver.tol')(command)
    command = click.option('--threads', type=int, default=None, help='run.threads')(command)
    command = click.option('--out-dir', type=click.Path(), default=None, help='run.out_dir')(command)
    return command


def _overrides(ppd=None, tol=None, threads=None, out_dir=None, sdw_count=None):
    return {'grid.points_per_decade': ppd, 'solver.tol': tol, 'run.threads': threads,
            'run.out_dir': out_dir, 'run.sdw_count': sdw_count}


@cli.command('solve')
@click.option('--rs', type=float, required=True, help='Density parameter r_s')
@click.option('--eps', type=float, required=True, help='Deformation eps in (0, 1)')
@click.option('--h', 'h', type=float, default=0.5, show_default=True, help='Cylinder height h')
@click.option('--sdw-count', type=int, default=None, help='SDWs superposed (hexa 2 ... bcc 12)')
@click.option('--kgrid', type=int, default=None, help='k values per k_F of a simulation mesh')
@_solver_options
@click.pass_context
@report_errors
def cmd_solve(ctx, rs, eps, h, sdw_count, kgrid, ppd, tol, threads, out_dir):
    """Solve the fixed-point equation at one (r_s, eps, h)"""
    config = _config(ctx, **_overrides(ppd, tol, threads, out_dir, sdw_count))
    d = deformation(rs, eps, h)
    result = solve(d, config)
    report = energy_report(d, result)

    summary = create_summary(report, result, sdw_count=config.run.sdw_count)
    if kgrid is not None:
        summary['kgrid'] = kgrid
        summary['kgrid_resolves'] = kgrid_resolves(report, kgrid)

    profile_path = os.path.join(config.run.out_dir, 'profile.csv')
    summary_path = os.path.join(config.run.out_dir, 'summary.json')
    save_profile(result, profile_path)
    save_summary(summary, summary_path)

    click.echo(f"✅ Converged in {report.iterations} iterations (residual {report.residual:.2e})")
    click.echo(f"xi(x_min) = {result.solution.xi[0]:.6f} on {result.grid.size} nodes")
    click.echo(f"Delta E_FG  = {report.delta_e_fg:.6e} Ha")
    click.echo(f"Delta E_SDW = {report.delta_e_sdw:.6e} Ha")
    click.echo(f"Delta E     = {report.delta_e_total:.6e} Ha (scaled {report.scaled_energy:.4f})")
    for warning in report.warnings:
        click.echo(f"⚠️ {warning}", err=True)
    click.echo(f"📊 Profile: {profile_path}, summary: {summary_path}")


@cli.command('optimize')
@click.option('--rs', type=float, required=True, help='Density parameter r_s')
@click.option('--h', 'h', type=float, default=0.5, show_default=True, help='Cylinder height h')
@click.option('--out', type=click.Path(), default=None, help='CSV output (default <out_dir>/optimize.csv)')
@click.option('--sdw-count', type=int, default=None, help='SDWs superposed')
@click.option('--kgrid', type=int, default=None, help='k values per k_F of a simulation mesh')
@_solver_options
@click.pass_context
@report_errors
def cmd_optimize(ctx, rs, h, out, sdw_count, kgrid, ppd, tol, threads, out_dir):
    """Minimize Delta E over eps at fixed (r_s, h)"""
    config = _config(ctx, **_overrides(ppd, tol, threads, out_dir, sdw_count))
    report = optimize_epsilon(rs, h, config)
    path = _out_path(config, out, 'optimize.csv')
    write_table(scan_frame([ScanRow(r_s=rs, h=h, report=report)], config.run.sdw_count), path)

    click.echo(f"✅ eps* = {report.eps_star:.6e} (eps0 = {report.eps0:.6e}, ratio {report.eps_ratio:.4f})")
    click.echo(f"Delta E = {report.delta_e_total:.6e} Ha, Delta E r_s^2/eps^3 = {report.scaled_energy:.4f}")
    if kgrid is not None:
        verdict = 'resolves' if kgrid_resolves(report, kgrid) else 'does not resolve'
        click.echo(f"A mesh of {kgrid} k values per k_F {verdict} eps*")
    click.echo(f"📊 Table: {path}")


@cli.command('scan')
@click.option('--rs-list', required=True, help='Comma separated r_s values')
@click.option('--h-list', default='0.5', show_default=True, help='Comma separated h values')
@click.option('--out', type=click.Path(), default=None, help='CSV output (default <out_dir>/scan.csv)')
@click.option('--sdw-count', type=int, default=None, help='SDWs superposed')
@click.option('--progress/--no-progress', default=True, help='tqdm progress bar on stderr')
@_solver_options
@click.pass_context
@report_errors
def cmd_scan(ctx, rs_list, h_list, out, sdw_count, progress, ppd, tol, threads, out_dir):
    """Optimize eps for every (r_s, h) pair and write the scan table"""
    config = _config(ctx, **_overrides(ppd, tol, threads, out_dir, sdw_count))
    rs_values = parse_float_list(rs_list, 'rs-list')
    h_values = parse_float_list(h_list, 'h-list')
    path = _out_path(config, out, 'scan.csv')

    rows, truncated = [], False
    try:
        for row in iter_scan(rs_values, h_values, config, progress=progress):
            rows.append(row)
    except KeyboardInterrupt:
        truncated = True
        click.echo(f"⚠️ Interrupted after {len(rows)} rows, writing partial table", err=True)

    df = scan_frame(sort_rows(rows), config.run.sdw_count)
    write_table(df, path, truncated=truncated)
    if len(df):
        click.echo(df[['r_s', 'h', 'eps_star', 'scaled_energy', 'energy_ratio']].to_string(index=False))
    failed = int((df['error'] != '').sum()) if len(df) else 0
    if failed:
        click.echo(f"⚠️ {failed} rows failed, see the error column", err=True)
    click.echo(f"📊 Table: {path}")
    if truncated:
        raise click.exceptions.Exit(1)


def fg_rows(r_s, eps_values, h_values, quad_settings, quadrature=True, progress=False):
    """
    Leading-order and quadrature Delta E_FG over an (eps, h) grid

    eps = 0 rows are all zeros; below the quadrature threshold only the leading
    order is given. Quadrature tolerance failures are flagged per point.

    Returns:
        pandas.DataFrame: Columns FG_COLUMNS
    """
    records = []
    points = [(eps, h) for eps in eps_values for h in h_values]
    for eps, h in tqdm(points, desc='fg', disable=not progress):
        record = {'r_s': r_s, 'eps': eps, 'h': h, 'delta_e_fg_leading': 0.0,
                  'delta_e_fg_quad': 0.0, 'quad_error': 0.0, 'flag': ''}
        if eps == 0:
            records.append(record)
            continue
        d = deformation(r_s, eps, h)
        record['delta_e_fg_leading'] = delta_e_fg_leading(d)
        record['delta_e_fg_quad'] = record['quad_error'] = math.nan
        if not quadrature:
            record['flag'] = 'quadrature off'
        elif eps < MIN_QUADRATURE_EPS:
            record['flag'] = 'leading order only'
        else:
            try:
                record['delta_e_fg_quad'], record['quad_error'] = delta_e_fg_quadrature(
                    d, quad_settings, return_error=True)
            except QuadratureError as e:
                record['delta_e_fg_quad'], record['quad_error'] = e.value, e.estimate
                record['flag'] = 'tolerance missed'
        records.append(record)
    return pd.DataFrame(records, columns=FG_COLUMNS)


@cli.command('fg')
@click.option('--rs', type=float, default=4.0, show_default=True, help='Density parameter r_s')
@click.option('--eps-list', default='0.05,0.1,0.2', show_default=True, help='Comma separated eps values')
@click.option('--h-grid', default='0:1:21', show_default=True, help='start:stop:num or a list')
@click.option('--quadrature/--no-quadrature', default=True, help='Also run the quadrature oracle')
@click.option('--out', type=click.Path(), default=None, help='CSV output (default <out_dir>/fg.csv)')
@click.option('--refine-depth', type=int, default=None, help='quad.refine_depth')
@click.option('--out-dir', type=click.Path(), default=None, help='run.out_dir')
@click.pass_context
@report_errors
def cmd_fg(ctx, rs, eps_list, h_grid, quadrature, out, refine_depth, out_dir):
    """Fermi-gas cost Delta E_FG as a function of h for several eps"""
    config = _config(ctx, **{'quad.refine_depth': refine_depth, 'run.out_dir': out_dir})
    eps_values = parse_float_list(eps_list, 'eps-list')
    h_values = parse_grid_spec(h_grid, 'h-grid')
    df = fg_rows(rs, eps_values, h_values, config.quad, quadrature=quadrature, progress=True)
    path = _out_path(config, out, 'fg.csv')
    write_table(df, path)

    for eps, curve in df[df['eps'] > 0].groupby('eps', sort=True):
        column = 'delta_e_fg_quad' if curve['delta_e_fg_quad'].notna().all() else 'delta_e_fg_leading'
        best = curve.loc[curve[column].idxmin()]
        gamma = deformation(rs, eps, 0.5).gamma
        click.echo(f"eps={eps:g}: min over h at h={best['h']:.3f} ({column}), optimal_h={optimal_h(gamma):.3f}")
    flagged = int((df['flag'] == 'tolerance missed').sum())
    if flagged:
        click.echo(f"⚠️ {flagged} quadrature points missed the tolerance", err=True)
    click.echo(f"📊 Table: {path}")


@cli.command('plot')
@click.option('--in', 'in_path', type=click.Path(), required=True, help='CSV produced by scan, fg or solve')
@click.option('--kind', type=click.Choice(PLOT_KINDS), required=True)
@click.option('--ref', 'ref_path', type=click.Path(), default=None, help='Reference CSV label,r_s,value')
@click.option('--ref-kind', type=click.Choice(['scaled_energy', 'eps_ratio', 'energy_ratio']),
              default='scaled_energy', show_default=True)
@click.option('--out', type=click.Path(), default=None, help='SVG output (default <in>.<kind>.svg)')
@click.pass_context
@report_errors
def cmd_plot(ctx, in_path, kind, ref_path, ref_kind, out):
    """Render a scan, fg or profile table as SVG"""
    df = read_table(in_path)
    references = load_reference(ref_path, ref_kind) if ref_path else []
    path = out or f"{os.path.splitext(in_path)[0]}.{kind}.svg"
    render_plot(df, kind, path, references)
    click.echo(f"📊 Plot: {path}")


def main(argv=None):
    """Entry point with the documented exit codes (click usage errors map to 1)"""
    try:
        result = cli.main(args=argv, prog_name='sdwbound', standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return 1
    except click.Abort:
        click.echo('Aborted.', err=True)
        return 1
    return result if isinstance(result, int) else 0
