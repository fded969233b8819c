import pytest

from sdwbound.config import CONFIG_ENV_VAR, RunConfig, load_config, parse_config_text
from sdwbound.errors import ConfigError


def test_defaults():
    config = RunConfig()
    assert config.grid.points_per_decade == 24
    assert config.solver.tol == 1e-10
    assert config.optimizer.bracket_factor == 20.0
    assert config.optimizer.max_expansions == 2
    assert config.quad.tolerance == 1e-6
    assert config.run.sdw_count == 1


def test_refined_quadrature_settings():
    quad = RunConfig().quad
    refined = quad.refined()
    assert refined.radial_panels == 2 * quad.radial_panels
    assert refined.axial_panels == 2 * quad.axial_panels
    assert refined.refine_depth > quad.refine_depth
    assert refined.order == quad.order


def test_parse_config_text():
    text = """
    # grid
    grid.points_per_decade = 32
    solver.tol = 1e-8   # tighter
    run.out_dir = results
    """
    assert parse_config_text(text) == {'grid.points_per_decade': '32', 'solver.tol': '1e-8',
                                       'run.out_dir': 'results'}


@pytest.mark.parametrize('text', ['grid.unknown = 3', 'nosection = 1', 'solver.tol 1e-8'])
def test_parse_config_rejects(text):
    with pytest.raises(ConfigError):
        parse_config_text(text)


def test_overrides_are_coerced():
    config = RunConfig().with_overrides({'grid.points_per_decade': '48', 'solver.tol': '1e-9',
                                         'solver.use_volume_scale': 'yes', 'run.threads': None})
    assert config.grid.points_per_decade == 48
    assert config.solver.tol == 1e-9
    assert config.solver.use_volume_scale is True
    assert config.run.threads == 1


@pytest.mark.parametrize('key, value', [('grid.points_per_decade', '2.5'), ('solver.tol', 'tiny'),
                                        ('solver.use_volume_scale', 'maybe')])
def test_overrides_reject_bad_values(key, value):
    with pytest.raises(ConfigError):
        RunConfig().with_overrides({key: value})


def test_load_config_layers(tmp_path, monkeypatch):
    env_file = tmp_path / 'env.cfg'
    env_file.write_text('grid.points_per_decade = 32\nsolver.tol = 1e-8\n', encoding='utf-8')
    cli_file = tmp_path / 'cli.cfg'
    cli_file.write_text('solver.tol = 1e-9\n', encoding='utf-8')
    monkeypatch.setenv(CONFIG_ENV_VAR, str(env_file))

    config = load_config(str(cli_file), {'run.threads': 2})
    assert config.grid.points_per_decade == 32
    assert config.solver.tol == 1e-9
    assert config.run.threads == 2


def test_load_config_missing_file(tmp_path, monkeypatch):
    monkeypatch.delenv(CONFIG_ENV_VAR, raising=False)
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / 'missing.cfg'))
    assert load_config() == RunConfig()
