import json
import os

import pandas as pd
import pytest
from click.testing import CliRunner

from sdwbound.asymptotics import eps0
from sdwbound.cli import cli, main
from sdwbound.utils.data_utils import FG_COLUMNS, SCAN_COLUMNS


@pytest.fixture
def runner(monkeypatch):
    monkeypatch.delenv('SDW_BOUND_CONFIG', raising=False)
    return CliRunner()


def test_constants(runner):
    result = runner.invoke(cli, ['constants'])
    assert result.exit_code == 0
    assert 'a_K/a_V = 37.9' in result.output
    assert 'C = 0.520' in result.output
    assert 'scaled constant = -0.115' in result.output


def test_solve_rejects_zero_eps(runner, tmp_path):
    result = runner.invoke(cli, ['solve', '--rs', '3', '--eps', '0', '--out-dir', str(tmp_path)])
    assert result.exit_code == 1


def test_solve_writes_profile_and_summary(runner, tmp_path):
    eps = eps0(3.0, 0.5)
    result = runner.invoke(cli, ['solve', '--rs', '3', '--eps', repr(eps), '--kgrid', '100',
                                 '--out-dir', str(tmp_path)])
    assert result.exit_code == 0, result.output

    profile = pd.read_csv(tmp_path / 'profile.csv')
    assert list(profile.columns) == ['x', 'xi', 'b_sq', 'weight']
    assert profile['xi'].iloc[0] >= 0.499
    assert (profile['x'].diff().dropna() > 0).all()

    with open(tmp_path / 'summary.json', encoding='utf-8') as f:
        summary = json.load(f)
    assert summary['delta_e_total'] == pytest.approx(summary['delta_e_fg'] + summary['delta_e_sdw'])
    assert summary['delta_e_total'] < 0
    assert summary['kgrid'] == 100
    assert summary['grid']['points'] == len(profile)


def test_optimize_writes_table(runner, tmp_path):
    out = tmp_path / 'opt.csv'
    result = runner.invoke(cli, ['optimize', '--rs', '1', '--ppd', '16', '--out', str(out)])
    assert result.exit_code == 0, result.output
    df = pd.read_csv(out, comment='#')
    assert set(SCAN_COLUMNS) <= set(df.columns)
    assert df['delta_e_total'].iloc[0] < 0


def test_scan_rejects_empty_list(runner, tmp_path):
    result = runner.invoke(cli, ['scan', '--rs-list', ' , ', '--out-dir', str(tmp_path)])
    assert result.exit_code == 1


def test_scan_records_row_errors(runner, tmp_path):
    out = tmp_path / 'scan.csv'
    result = runner.invoke(cli, ['scan', '--rs-list', '1,10', '--ppd', '16', '--no-progress',
                                 '--out', str(out)])
    assert result.exit_code == 0, result.output
    df = pd.read_csv(out, comment='#', keep_default_na=False)
    assert list(df['r_s']) == [1.0, 10.0]
    assert df['error'].iloc[0] == ''
    assert 'ParameterDomainError' in df['error'].iloc[1]


def test_fg_leading_order_only(runner, tmp_path):
    out = tmp_path / 'fg.csv'
    result = runner.invoke(cli, ['fg', '--eps-list', '0,0.1', '--no-quadrature', '--out', str(out)])
    assert result.exit_code == 0, result.output
    df = pd.read_csv(out)
    assert list(df.columns) == FG_COLUMNS
    flat = df[df['eps'] == 0]
    assert len(flat) == 21
    assert (flat['delta_e_fg_leading'] == 0).all() and (flat['delta_e_fg_quad'] == 0).all()
    curve = df[df['eps'] == 0.1]
    best_h = curve.loc[curve['delta_e_fg_leading'].idxmin(), 'h']
    assert 0.3 <= best_h <= 0.55
    assert (curve['flag'] == 'quadrature off').all()


def test_plot_empty_table(runner, tmp_path):
    table = tmp_path / 'scan.csv'
    table.write_text(','.join(SCAN_COLUMNS) + '\n', encoding='utf-8')
    out = tmp_path / 'scaled_energy.svg'
    result = runner.invoke(cli, ['plot', '--in', str(table), '--kind', 'scaled_energy', '--out', str(out)])
    assert result.exit_code == 0, result.output
    assert os.path.exists(out)


def test_plot_accepts_figure_alias(runner, tmp_path):
    table = tmp_path / 'scan.csv'
    table.write_text(','.join(SCAN_COLUMNS) + '\n', encoding='utf-8')
    result = runner.invoke(cli, ['plot', '--in', str(table), '--kind', 'fig3'])
    assert result.exit_code == 0, result.output
    assert os.path.exists(tmp_path / 'scan.fig3.svg')


def test_plot_schema_mismatch(runner, tmp_path):
    table = tmp_path / 'profile.csv'
    table.write_text('x,xi\n1,0.5\n', encoding='utf-8')
    result = runner.invoke(cli, ['plot', '--in', str(table), '--kind', 'eps_ratio'])
    assert result.exit_code == 1


def test_unknown_config_key(runner, tmp_path):
    config = tmp_path / 'run.cfg'
    config.write_text('solver.bogus = 1\n', encoding='utf-8')
    result = runner.invoke(cli, ['--config', str(config), 'constants'])
    assert result.exit_code == 1
    assert 'Unknown config key' in result.output
    result = runner.invoke(cli, ['--config', str(config), 'optimize', '--rs', '1'])
    assert result.exit_code == 1
    assert 'Unknown config key' in result.output


def test_main_maps_usage_errors(monkeypatch):
    monkeypatch.delenv('SDW_BOUND_CONFIG', raising=False)
    assert main(['solve', '--rs', '1']) == 1
    assert main(['constants']) == 0
    assert main(['solve', '--rs', '1', '--eps', '2']) == 1


def test_optimize_sdw_count(runner, tmp_path):
    out = tmp_path / 'opt.csv'
    result = runner.invoke(cli, ['optimize', '--rs', '1', '--ppd', '16', '--sdw-count', '12', '--out', str(out)])
    assert result.exit_code == 0, result.output
    df = pd.read_csv(out, comment='#')
    assert df['delta_e_jellium'].iloc[0] == pytest.approx(12 * df['delta_e_total'].iloc[0])
