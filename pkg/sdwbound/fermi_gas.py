"""
Fermi-gas energy cost of the truncated-sphere-plus-cylinder deformation

Two routes are provided:
  * delta_e_fg_leading: the leading order in eps, used on every optimization path
  * quadrature of K_FG = int k^2 and V_FG = int int 1/|k - k'|^2 over the
    axisymmetric occupied volume, used as an oracle

The quadrature works on "slabs" z0 <= z <= z1, rho_lo(z) <= rho <= rho_hi(z).
The azimuthal integrals are done analytically,
    int_0^{2pi} dphi / (A - B cos phi) = 2 pi / sqrt(A^2 - B^2),
and so is the remaining integral over rho'^2, which leaves a log singularity
at z' = z that is handled by dyadic refinement.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.stats import qmc

from .config import QuadratureSettings
from .errors import ParameterDomainError, QuadratureError
from .kernel import sphere_potential
from .params import Deformation, constants, gamma0, volume_scale_power_minus_one

logger = logging.getLogger(__name__)

MIN_QUADRATURE_EPS = 0.02
DIFFERENCE_TOLERANCE = 0.1
CHUNK = 256

# unit sphere, both spins
SPHERE_K = 8 * math.pi / 5
SPHERE_V = 8 * math.pi ** 2


@dataclass(frozen=True)
class FgEnergyBreakdown:
    kinetic: float
    exchange: float
    total: float
    K_FG: float
    V_FG: float
    error_K: float = 0.0
    error_V: float = 0.0


def delta_e_fg_leading(deformation):
    """
    Leading order in eps of the Fermi-gas energy cost

        Delta E_FG = (2 pi^2 a_V eps^3 / r_s) [alpha (gamma - 1) - 1/9 + h]

    Args:
        deformation (Deformation): Parameter bundle

    Returns:
        float: Hartree per particle
    """
    d = deformation
    bracket = d.alpha * (d.gamma - 1) - 1 / 9 + d.h
    return 2 * math.pi ** 2 * constants().a_V * d.eps ** 3 / d.r_s * bracket


def optimal_h(gamma):
    """
    Cylinder height minimizing the leading-order cost, h = 1/2 - 1/(4 (gamma - 1))

    Args:
        gamma (float): gamma > 1

    Returns:
        float: h, clipped at 0 for 1 < gamma <= 3/2
    """
    if not gamma > 1:
        raise ParameterDomainError(f"optimal_h needs gamma > 1, got {gamma}")
    return max(0.5 - 1 / (4 * (gamma - 1)), 0.0)


@dataclass(frozen=True)
class Profile:
    """Radius bound rho(z): 'zero', 'sphere' (sqrt(1 - z^2)) or 'const'"""
    kind: str
    value: float = 0.0

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        if self.kind == 'zero':
            return np.zeros_like(z)
        if self.kind == 'sphere':
            return np.sqrt(np.clip(1 - z * z, 0.0, None))
        return np.full_like(z, self.value)


@dataclass(frozen=True)
class Slab:
    z0: float
    z1: float
    lower: Profile
    upper: Profile
    sign: int = 1


ZERO = Profile('zero')
SPHERE = Profile('sphere')


def occupied_slabs(eps, h):
    """
    One spin volume: unit sphere cut at 1 - eps with a cylinder of height h eps on top

    Args:
        eps (float): Cap depth, 0 gives the unit sphere
        h (float): Relative cylinder height

    Returns:
        list: Slabs with sign +1
    """
    if eps == 0:
        return [Slab(-1.0, 1.0, ZERO, SPHERE)]
    r = math.sqrt(eps * (2 - eps))
    slabs = [Slab(-1.0, 1 - eps, ZERO, SPHERE)]
    if h > 0:
        slabs.append(Slab(1 - eps, 1 - eps + h * eps, ZERO, Profile('const', r)))
    return slabs


def difference_slabs(eps, h):
    """
    Signed region D with 1_F = 1_sphere + 1_D

    D is +1 on the annulus between the sphere and the cylinder wall below Q/2
    and -1 on the part of the cap above Q/2.
    """
    r = math.sqrt(eps * (2 - eps))
    top = 1 - eps + h * eps
    slabs = []
    if top > 1 - eps:
        slabs.append(Slab(1 - eps, top, SPHERE, Profile('const', r), 1))
    if top < 1:
        slabs.append(Slab(top, 1.0, ZERO, SPHERE, -1))
    return slabs


def _gauss_panels(a, b, panels, order):
    """Composite Gauss-Legendre nodes and weights on [a, b]"""
    x, w = leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _outer_nodes(slab, settings):
    """(rho, z, weight) of the volume rule 2 pi rho drho dz on a slab"""
    z, wz = _gauss_panels(slab.z0, slab.z1, settings.axial_panels, settings.order)
    lo, hi = slab.lower(z), slab.upper(z)
    x, w = _gauss_panels(0.0, 1.0, settings.radial_panels, settings.order)
    rho = lo[:, None] + (hi - lo)[:, None] * x[None, :]
    weight = 2 * np.pi * rho * ((hi - lo) * wz)[:, None] * w[None, :]
    return rho.ravel(), np.repeat(z, len(x)), weight.ravel()


def _graded_reference(depth, order):
    """
    Nodes t in (0, 1] and weights for int_0^1 phi(t) dt with phi log-singular at 0

    Dyadic panels [2^-(k+1), 2^-k] for k < depth, then t = 2^-depth u^3 on the last one.
    """
    x, w = leggauss(order)
    u, wu = 0.5 * (x + 1), 0.5 * w
    nodes, weights = [], []
    for k in range(depth):
        a, b = 2.0 ** -(k + 1), 2.0 ** -k
        nodes.append(a + (b - a) * u)
        weights.append((b - a) * wu)
    scale = 2.0 ** -depth
    nodes.append(scale * u ** 3)
    weights.append(scale * 3 * u ** 2 * wu)
    return np.concatenate(nodes), np.concatenate(weights)


def _ring_log_difference(s1, s2, rho, dz):
    """
    int_{s1}^{s2} ds / sqrt((s + b)^2 + D),  b = dz^2 - rho^2,  D = 4 rho^2 dz^2

    With s = rho'^2 this is the rho' integral of the azimuthally integrated kernel (up to pi).
    """
    b = dz * dz - rho * rho
    D = 4 * rho * rho * dz * dz
    q1, q2 = s1 + b, s2 + b
    with np.errstate(divide='ignore', invalid='ignore'):
        r1, r2 = np.sqrt(q1 * q1 + D), np.sqrt(q2 * q2 + D)
        g1 = np.where(q1 >= 0, np.log(q1 + r1), -np.log(r1 - q1))
        g2 = np.where(q2 >= 0, np.log(q2 + r2), -np.log(r2 - q2))
        crossing = (q1 < 0) & (q2 >= 0)
        return g2 - g1 - np.where(crossing, np.log(D), 0.0)


def _slab_potential(rho, z, slab, settings, reference):
    """
    Phi(rho, z) = int_slab dk' / |k - k'|^2 at points (rho, z)

    Phi = pi int dz' int ds / sqrt(A^2 - B^2), s = rho'^2, with the s integral in
    closed form and the z' integral on a grid graded toward z' = z.
    """
    t, wt = reference
    c = np.clip(z, slab.z0, slab.z1)
    left, right = c - slab.z0, slab.z1 - c
    zp = np.concatenate([c[:, None] - left[:, None] * t[None, :],
                         c[:, None] + right[:, None] * t[None, :]], axis=1)
    wp = np.concatenate([left[:, None] * wt[None, :], right[:, None] * wt[None, :]], axis=1)
    lo, hi = slab.lower(zp), slab.upper(zp)
    values = _ring_log_difference(lo * lo, hi * hi, rho[:, None], z[:, None] - zp)
    values = np.where(wp > 0, values, 0.0)
    return np.pi * np.sum(wp * values, axis=1)


def _pair_exchange(slab_i, slab_j, settings, reference):
    """V(slab_i, slab_j) = int_{slab_i} dk Phi_j(k), unsigned"""
    rho, z, weight = _outer_nodes(slab_i, settings)
    total = 0.0
    for start in range(0, len(rho), CHUNK):
        part = slice(start, start + CHUNK)
        total += float(np.dot(weight[part], _slab_potential(rho[part], z[part], slab_j, settings, reference)))
    return total


def _self_exchange(slabs, settings):
    """Signed V(S, S) of a union of signed slabs"""
    reference = _graded_reference(settings.refine_depth, settings.order)
    total = 0.0
    for i, slab_i in enumerate(slabs):
        for j in range(i, len(slabs)):
            slab_j = slabs[j]
            factor = 1.0 if i == j else 2.0
            total += factor * slab_i.sign * slab_j.sign * _pair_exchange(slab_i, slab_j, settings, reference)
    return total


def _kinetic(slabs, settings):
    """Signed int k^2 dk over the slabs (exact for polynomial profiles)"""
    total = 0.0
    for slab in slabs:
        z, wz = _gauss_panels(slab.z0, slab.z1, settings.axial_panels, settings.order)
        lo2, hi2 = slab.lower(z) ** 2, slab.upper(z) ** 2
        integrand = 2 * np.pi * ((hi2 ** 2 - lo2 ** 2) / 4 + z * z * (hi2 - lo2) / 2)
        total += slab.sign * float(np.dot(wz, integrand))
    return total


def _sphere_overlap(slabs, settings):
    """Signed int v_sphere(k) dk over the slabs"""
    total = 0.0
    for slab in slabs:
        rho, z, weight = _outer_nodes(slab, settings)
        total += slab.sign * float(np.dot(weight, sphere_potential(np.sqrt(rho * rho + z * z))))
    return total


def _volume_integrals(eps, h, settings):
    slabs = occupied_slabs(eps, h)
    return 2 * _kinetic(slabs, settings), 2 * _self_exchange(slabs, settings)


def fg_integrals_quadrature(deformation, settings=None, strict=False):
    """
    K_FG and V_FG of the deformed volume (both spins) and the resulting energy

    The error estimates are twice the change seen when every panel is halved.

    Args:
        deformation (Deformation): Parameter bundle; eps = 0 gives the unit sphere
        settings (QuadratureSettings): Panel layout and target tolerance
        strict (bool): Raise QuadratureError instead of warning when the tolerance is missed

    Returns:
        FgEnergyBreakdown: Integrals, energies and error estimates
    """
    settings = settings or QuadratureSettings()
    d = deformation
    k_coarse, v_coarse = _volume_integrals(d.eps, d.h, settings)
    k_fine, v_fine = _volume_integrals(d.eps, d.h, settings.refined())
    error_k, error_v = 2 * abs(k_fine - k_coarse), 2 * abs(v_fine - v_coarse)

    relative = max(error_k / k_fine, error_v / v_fine)
    if relative > settings.tolerance:
        message = (f"Fermi-volume quadrature missed tolerance {settings.tolerance:.1e}: "
                   f"rel. errors K {error_k / k_fine:.2e}, V {error_v / v_fine:.2e}")
        if strict:
            raise QuadratureError(message, estimate=relative, value=(k_fine, v_fine))
        logger.warning("⚠️ %s", message)

    c = constants()
    kinetic = c.a_K * d.R ** 5 / d.r_s ** 2 * k_fine
    exchange = -c.a_V * d.R ** 4 / d.r_s * v_fine
    return FgEnergyBreakdown(kinetic=kinetic, exchange=exchange, total=kinetic + exchange,
                             K_FG=k_fine, V_FG=v_fine, error_K=error_k, error_V=error_v)


def _difference_energy(deformation, settings):
    d = deformation
    slabs = difference_slabs(d.eps, d.h)
    delta_k = 2 * _kinetic(slabs, settings)
    delta_v = 2 * (2 * _sphere_overlap(slabs, settings) + _self_exchange(slabs, settings))
    c = constants()
    r5m1 = volume_scale_power_minus_one(d.eps, d.h, 5)
    r4m1 = volume_scale_power_minus_one(d.eps, d.h, 4)
    kinetic = c.a_K / d.r_s ** 2 * (r5m1 * SPHERE_K + (1 + r5m1) * delta_k)
    exchange = c.a_V / d.r_s * (r4m1 * SPHERE_V + (1 + r4m1) * delta_v)
    return kinetic - exchange


def delta_e_fg_quadrature(deformation, settings=None, return_error=False):
    """
    Fermi-gas cost E_FG(deformed, scaled by R) - E_FG(sphere) by quadrature

    The occupied volume is written as sphere + D with D the signed difference
    region, so only integrals over D are evaluated and nothing large cancels.

    Args:
        deformation (Deformation): Parameter bundle with eps >= 0.02
        settings (QuadratureSettings): Panel layout
        return_error (bool): Also return the error estimate

    Returns:
        float or tuple: Delta E_FG in Hartree (and its error estimate)
    """
    settings = settings or QuadratureSettings()
    if deformation.eps < MIN_QUADRATURE_EPS:
        raise ParameterDomainError(
            f"Quadrature needs eps >= {MIN_QUADRATURE_EPS}, got {deformation.eps}; use delta_e_fg_leading")

    coarse = _difference_energy(deformation, settings)
    fine = _difference_energy(deformation, settings.refined())
    error = 2 * abs(fine - coarse)
    if error > DIFFERENCE_TOLERANCE * abs(fine):
        raise QuadratureError(
            f"Delta E_FG error estimate {error:.3e} exceeds 10% of {fine:.3e}", estimate=error, value=fine)
    logger.debug("📊 Delta E_FG(eps=%g, h=%g) = %.6e +- %.1e", deformation.eps, deformation.h, fine, error)
    return (fine, error) if return_error else fine


def _inside(points, eps, h):
    rho_sq = points[:, 0] ** 2 + points[:, 1] ** 2
    z = points[:, 2]
    body = (z <= 1 - eps) & (rho_sq + z * z <= 1)
    if eps == 0:
        return body
    cylinder = (z > 1 - eps) & (z <= 1 - eps + h * eps) & (rho_sq <= eps * (2 - eps))
    return body | cylinder


def exchange_integral_qmc(deformation, n_points=2 ** 15, n_scrambles=8, seed=0):
    """
    Randomized quasi-Monte-Carlo estimate of V_FG (both spins)

    Writing k' = k + u n with |n| = 1 cancels the 1/u^2 against the Jacobian:
        V = int_F dk int dOmega int_0^inf du 1_F(k + u n)
    so the 6-D integrand is a bounded indicator.

    Args:
        deformation (Deformation): Parameter bundle; eps = 0 gives the unit sphere
        n_points (int): Sobol points per scramble (power of two)
        n_scrambles (int): Independent scrambles for the standard error
        seed (int): Scrambling seed

    Returns:
        tuple: (estimate, standard_error)
    """
    eps, h = deformation.eps, deformation.h
    lows = np.array([-1.0, -1.0, -1.0])
    highs = np.array([1.0, 1.0, 1.0])
    box_volume = float(np.prod(highs - lows))
    reach = float(np.linalg.norm(highs - lows))
    rng = np.random.default_rng(seed)

    estimates = []
    for _ in range(n_scrambles):
        sample = qmc.Sobol(d=6, scramble=True, seed=rng).random(n_points)
        k = lows + (highs - lows) * sample[:, :3]
        length = reach * sample[:, 3]
        cos_theta = 2 * sample[:, 4] - 1
        sin_theta = np.sqrt(1 - cos_theta ** 2)
        phi = 2 * np.pi * sample[:, 5]
        direction = np.stack([sin_theta * np.cos(phi), sin_theta * np.sin(phi), cos_theta], axis=1)
        hits = _inside(k, eps, h) & _inside(k + length[:, None] * direction, eps, h)
        estimates.append(2 * box_volume * 4 * np.pi * reach * hits.mean())
    estimates = np.array(estimates)
    return float(estimates.mean()), float(estimates.std(ddof=1) / math.sqrt(n_scrambles))


def undeformed(r_s):
    """Unit Fermi sphere at density r_s, as a Deformation with eps = 0"""
    return Deformation(r_s=float(r_s), eps=0.0, h=0.0, gamma=math.inf, gamma0=gamma0(float(r_s)),
                       alpha=1 / 6, Q=2.0, r=0.0, R=1.0)
