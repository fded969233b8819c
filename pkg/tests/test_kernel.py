import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate

from sdwbound.asymptotics import eps0, gamma_prime, x0
from sdwbound.config import GridSettings
from sdwbound.errors import ParameterDomainError
from sdwbound.kernel import (HALF_KERNEL_MASS, apply_operator_quad, assemble_operator, assemble_operators,
                             build_grid, disk_kernel, disk_kernel_integral, disk_kernel_qmc, gap_function,
                             gap_values, local_correction, log_grid, sphere_potential)
from sdwbound.params import deformation


def test_kernel_tail():
    assert 100 ** 2 * disk_kernel(100.0) == pytest.approx(1.0, abs=1e-3)
    assert 1e6 ** 2 * disk_kernel(1e6) == pytest.approx(1.0, rel=1e-9)


def test_kernel_small_x_log():
    for x in (1e-6, 1e-9):
        assert disk_kernel(x) == pytest.approx(-2 * math.log(x) - 1, abs=1e-5)


def test_kernel_even_and_decreasing():
    x = np.logspace(-4, 3, 200)
    assert_allclose(disk_kernel(-x), disk_kernel(x))
    assert np.all(np.diff(disk_kernel(x)) < 0)
    assert np.all(disk_kernel(x) > 0)


@pytest.mark.parametrize('t', [0.1, 0.5, 1.0, 5.0, 40.0])
def test_kernel_integral_closed_form(t):
    value, _ = integrate.quad(disk_kernel, 0, t, limit=200, epsabs=0, epsrel=1e-12)
    assert disk_kernel_integral(t) == pytest.approx(value, rel=1e-9)


def test_kernel_integral_limits():
    assert disk_kernel_integral(0.0) == 0.0
    assert disk_kernel_integral(1e9) == pytest.approx(HALF_KERNEL_MASS, abs=1e-8)
    assert disk_kernel_integral(-2.0) == pytest.approx(-disk_kernel_integral(2.0))


@pytest.mark.parametrize('t', [1e-21, 1e-12, 1e-6, 1e-3])
def test_kernel_integral_small_argument(t):
    series = -2 * t * math.log(t) + t + t ** 2 - t ** 3 / 6 + t ** 4 / 48
    assert disk_kernel_integral(t) == pytest.approx(series, rel=1e-12)
    assert disk_kernel_integral(t) > 0


def test_kernel_integral_branches_join():
    below, above = disk_kernel_integral(1 - 1e-12), disk_kernel_integral(1 + 1e-12)
    assert below == pytest.approx(above, rel=1e-11)


@pytest.mark.parametrize('x', [0.5, 1.0, 2.0])
def test_kernel_matches_disk_integral(x):
    estimate, stderr = disk_kernel_qmc(x, n_points=2 ** 14, n_scrambles=16, seed=1)
    assert abs(estimate - disk_kernel(x)) < 4 * stderr + 1e-12


def test_sphere_potential():
    assert sphere_potential(0.0) == pytest.approx(4 * math.pi)
    assert sphere_potential(1.0) == pytest.approx(2 * math.pi)
    assert sphere_potential(1 - 1e-9) == pytest.approx(2 * math.pi, rel=1e-6)
    assert sphere_potential(1 + 1e-9) == pytest.approx(2 * math.pi, rel=1e-6)
    # sum over the sphere reproduces the exchange integral of one spin
    value, _ = integrate.quad(lambda k: 4 * math.pi * k * k * sphere_potential(k), 0, 1, limit=200)
    assert value == pytest.approx(4 * math.pi ** 2, rel=1e-9)


def test_sphere_potential_far_field():
    k = 50.0
    assert sphere_potential(k) * k * k == pytest.approx(4 * math.pi / 3, rel=1e-3)


def test_gap_values():
    assert gap_values(0.0, 5.0) == 0.0
    assert gap_values(1.0, 5.0) == pytest.approx(5.0)
    assert gap_values(math.e, 2.0) == pytest.approx(0.0, abs=1e-12)


def test_gap_function_uses_deformation_gamma():
    d = deformation(1.0, 0.01, 0.5)
    x = np.logspace(-8, 0, 50)
    assert_allclose(gap_function(x, d), d.gamma * x - 2 * x * np.log(x))
    assert np.all(gap_function(x, d) > 0)
    assert gap_function(0.0, d) == 0.0


def test_log_grid_weights_close_exactly():
    grid = log_grid(1e-6, 40.0, 24)
    assert grid.weights.sum() == pytest.approx(40.0 - 1e-6, rel=1e-13)
    assert np.all(np.diff(grid.nodes) > 0)
    assert np.all(grid.weights > 0)
    assert grid.nodes[0] == 1e-6 and grid.nodes[-1] == 40.0


def test_log_grid_integrates_smooth_functions():
    grid = log_grid(1e-4, 1e2, 96)
    exact = math.exp(-1e-4) - math.exp(-1e2)
    assert grid.inner(np.exp(-grid.nodes), 1.0) == pytest.approx(exact, rel=1e-3)


def test_log_grid_rejects_sparse_or_empty():
    with pytest.raises(ParameterDomainError):
        log_grid(1e-3, 1.0, 4)
    with pytest.raises(ParameterDomainError):
        log_grid(1.0, 1.0, 24)


def test_build_grid_brackets_plateau(config):
    d = deformation(1.0, 1e-4, 0.5)
    grid = build_grid(d, config.grid, tol=config.solver.tol)
    assert grid.x_min < x0(gamma_prime(d.gamma))
    assert grid.x_max <= d.x_limit
    assert grid.tail_bound <= config.solver.tol


def test_build_grid_extension_adds_decades(config):
    d = deformation(1.0, 1e-4, 0.5)
    base = build_grid(d, config.grid)
    extended = build_grid(d, config.grid, extra_decades=2)
    assert extended.x_min == pytest.approx(base.x_min / 100)
    assert extended.size > base.size


def test_build_grid_rejects_loose_cut():
    d = deformation(1.0, 1e-4, 0.5)
    with pytest.raises(ParameterDomainError):
        build_grid(d, GridSettings(x_max_cut=10.0), tol=1e-10)


@pytest.fixture(scope='module')
def operators():
    grid = log_grid(1e-5, 50.0, 24)
    return grid, assemble_operators(grid)


def test_operators_symmetric_in_weighted_product(operators):
    grid, ops = operators
    rng = np.random.default_rng(0)
    for op in ops:
        for _ in range(100):
            f, g = rng.random(grid.size), rng.random(grid.size)
            defect = abs(grid.inner(op(f), g) - grid.inner(f, op(g)))
            assert defect <= 1e-8 * grid.norm(f) * grid.norm(g)


def test_local_correction_structure():
    grid = log_grid(1e-5, 50.0, 24)
    correction = local_correction(grid)
    weighted = grid.weights[:, None] * correction
    assert_allclose(weighted, weighted.T, atol=1e-15)
    assert_allclose(correction @ np.ones(grid.size), 0.0, atol=1e-12)
    off_diagonal = correction - np.diag(np.diag(correction))
    assert np.all(off_diagonal >= 0)
    assert np.count_nonzero(np.triu(correction, 2)) == 0
    # no correction where x h > 1
    far = np.flatnonzero(grid.nodes * grid.step > 1.5)
    assert not np.any(correction[far])


def test_deep_grid_keeps_nonnegative_operators():
    d = deformation(0.01, 5 * eps0(0.01, 0.5), 0.5)
    grid = build_grid(d, GridSettings())
    assert grid.x_min < 1e-19
    t_plus, t_minus = assemble_operators(grid, d)
    assert t_plus.bad_rows == () and t_minus.bad_rows == ()
    assert np.all(t_plus.matrix >= 0) and np.all(t_minus.matrix >= 0)


def test_operators_preserve_positivity(operators):
    grid, ops = operators
    assert not ops[0].bad_rows and not ops[1].bad_rows
    for op in ops:
        assert np.all(op.matrix >= 0)
    rng = np.random.default_rng(1)
    for _ in range(100):
        f = rng.random(grid.size) * (rng.random(grid.size) < 0.5)
        for op in ops:
            assert np.all(op(f) >= 0)
        assert grid.inner(ops[1](f), f) >= 0


def test_assemble_operator_rejects_sign():
    grid = log_grid(1e-3, 1.0, 16)
    with pytest.raises(ParameterDomainError):
        assemble_operator(grid, 0)


TEST_FUNCTIONS = [
    lambda x: math.exp(-x),
    lambda x: 1 / (1 + x * x),
    lambda x: math.exp(-x) * math.cos(x),
    lambda x: x * math.exp(-x),
    lambda x: 1 / (1 + x) ** 3,
]


@pytest.mark.parametrize('f', TEST_FUNCTIONS)
@pytest.mark.parametrize('sign', [1, -1])
def test_matrix_apply_matches_quadrature(f, sign):
    grid = log_grid(1e-6, 1e4, GridSettings().points_per_decade)
    op = assemble_operator(grid, sign)
    values = op(np.array([f(x) for x in grid.nodes]))
    picks = [int(i) for i in np.searchsorted(grid.nodes, [0.01, 0.1, 0.5, 1.0, 3.0])]
    reference = np.array([apply_operator_quad(f, grid.nodes[i], sign, grid.x_min, grid.x_max)
                          for i in picks])
    assert_allclose(values[picks], reference, rtol=1e-6, atol=1e-6 * np.max(np.abs(reference)))


def test_local_correction_improves_apply():
    grid = log_grid(1e-6, 1e4, 24)
    op = assemble_operator(grid, 1)
    f = np.exp(-grid.nodes)
    i = int(np.searchsorted(grid.nodes, 0.5))
    reference = apply_operator_quad(lambda x: math.exp(-x), grid.nodes[i], 1, grid.x_min, grid.x_max)
    uncorrected = op.matrix - np.pi * local_correction(grid)
    assert abs(op(f)[i] - reference) < 0.1 * abs((uncorrected @ f)[i] - reference)
