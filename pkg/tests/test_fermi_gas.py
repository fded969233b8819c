import math

import numpy as np
import pytest
from scipy import integrate

from sdwbound.config import QuadratureSettings
from sdwbound.errors import ParameterDomainError
from sdwbound.fermi_gas import (SPHERE_K, SPHERE_V, Slab, _graded_reference, _kinetic, _slab_potential,
                                delta_e_fg_leading, delta_e_fg_quadrature, difference_slabs,
                                exchange_integral_qmc, fg_integrals_quadrature, occupied_slabs, optimal_h,
                                undeformed)
from sdwbound.fermi_gas import SPHERE as SPHERE_PROFILE
from sdwbound.fermi_gas import ZERO as ZERO_PROFILE
from sdwbound.kernel import sphere_potential
from sdwbound.params import constants, deformation, gamma_of


def test_leading_order_example():
    assert delta_e_fg_leading(deformation(1.0, 0.01, 0.5)) == pytest.approx(3.57e-7, rel=2e-2)


def test_leading_order_scaling():
    d = deformation(1.0, 0.01, 0.5)
    base = delta_e_fg_leading(d)
    assert delta_e_fg_leading(deformation(2.0, 0.01, 0.5)) < base
    bracket = d.alpha * (d.gamma - 1) - 1 / 9 + d.h
    assert base / d.eps ** 3 / bracket == pytest.approx(2 * math.pi ** 2 * constants().a_V, rel=1e-12)


def test_leading_order_h_ratio_tends_to_four():
    eps = 1e-40
    flat = delta_e_fg_leading(deformation(0.01, eps, 0.0))
    half = delta_e_fg_leading(deformation(0.01, eps, 0.5))
    assert flat / half == pytest.approx(4.0, rel=2e-2)


@pytest.mark.parametrize('r_s, eps', [(1.0, 0.01), (4.0, 0.1), (0.1, 1e-5)])
def test_leading_order_minimum_in_h(r_s, eps):
    h_grid = np.linspace(0, 1, 2001)
    values = [delta_e_fg_leading(deformation(r_s, eps, h)) for h in h_grid]
    best = h_grid[int(np.argmin(values))]
    assert best == pytest.approx(optimal_h(gamma_of(r_s, eps)), abs=1e-3)


def test_optimal_h():
    assert optimal_h(1e9) == pytest.approx(0.5)
    assert optimal_h(2.0) == pytest.approx(0.25)
    assert optimal_h(1.2) == 0.0
    assert 0.35 <= optimal_h(gamma_of(4.0, 0.1)) <= 0.5
    with pytest.raises(ParameterDomainError):
        optimal_h(1.0)


def test_azimuthal_identity():
    value, _ = integrate.quad(lambda phi: 1 / (3 - math.cos(phi)), 0, 2 * math.pi)
    assert value == pytest.approx(2 * math.pi / math.sqrt(8), rel=1e-12)


def test_slabs_cover_deformed_volume():
    eps, h = 0.1, 0.5
    settings = QuadratureSettings()
    occupied = 2 * _kinetic(occupied_slabs(eps, h), settings)
    difference = 2 * _kinetic(difference_slabs(eps, h), settings)
    assert occupied - SPHERE_K == pytest.approx(difference, rel=1e-10)
    assert 2 * _kinetic(occupied_slabs(0.0, 0.0), settings) == pytest.approx(SPHERE_K, rel=1e-12)


def test_difference_slab_signs():
    signs = sorted(slab.sign for slab in difference_slabs(0.1, 0.5))
    assert signs == [-1, 1]
    assert [slab.sign for slab in difference_slabs(0.1, 1.0)] == [1]


@pytest.mark.parametrize('rho, z', [(0.3, 0.2), (0.5, -0.6), (1.2, 0.5), (0.0, 0.9)])
def test_slab_potential_of_sphere(rho, z):
    slab = Slab(-1.0, 1.0, ZERO_PROFILE, SPHERE_PROFILE)
    settings = QuadratureSettings()
    reference = _graded_reference(settings.refine_depth, settings.order)
    value = _slab_potential(np.array([rho]), np.array([z]), slab, settings, reference)[0]
    assert value == pytest.approx(sphere_potential(math.hypot(rho, z)), rel=1e-5)


def test_sphere_integrals():
    breakdown = fg_integrals_quadrature(undeformed(1.0))
    assert breakdown.K_FG == pytest.approx(SPHERE_K, rel=1e-10)
    assert breakdown.V_FG == pytest.approx(SPHERE_V, rel=1e-4)
    assert breakdown.error_V < 1e-3 * SPHERE_V
    assert breakdown.total < 0


@pytest.mark.parametrize('r_s', [0.1, 1.0, 3.0])
def test_undeformed_has_finite_gamma0(r_s):
    d = undeformed(r_s)
    assert math.isfinite(d.gamma0)
    c = constants()
    assert d.gamma0 == pytest.approx(c.a_K / (c.a_V * math.pi * r_s), rel=1e-12)


def test_qmc_exchange_of_sphere():
    estimate, stderr = exchange_integral_qmc(undeformed(1.0))
    assert stderr > 0
    assert abs(estimate - SPHERE_V) < 4 * stderr


def test_quadrature_refuses_small_eps():
    with pytest.raises(ParameterDomainError):
        delta_e_fg_quadrature(deformation(4.0, 0.01, 0.5))


@pytest.mark.slow
def test_quadrature_tracks_leading_order():
    ratios = []
    for eps in (0.2, 0.1, 0.05):
        d = deformation(4.0, eps, 0.5)
        ratios.append(delta_e_fg_quadrature(d) / delta_e_fg_leading(d))
    deviations = [abs(r - 1) for r in ratios]
    assert deviations[0] > deviations[1] > deviations[2]


@pytest.mark.slow
@pytest.mark.parametrize('eps', [0.05, 0.1, 0.2])
def test_quadrature_minimum_in_h(eps):
    h_grid = np.linspace(0.1, 0.8, 15)
    values = [delta_e_fg_quadrature(deformation(4.0, eps, h)) for h in h_grid]
    best = int(np.argmin(values))
    assert 0 < best < len(h_grid) - 1
    assert 0.3 <= h_grid[best] <= 0.55


@pytest.mark.slow
def test_deformed_exchange_matches_qmc():
    d = deformation(4.0, 0.2, 0.5)
    breakdown = fg_integrals_quadrature(d)
    estimate, stderr = exchange_integral_qmc(d, n_points=2 ** 16, n_scrambles=16)
    assert abs(estimate - breakdown.V_FG) < 4 * stderr + breakdown.error_V
