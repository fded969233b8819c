"""
Physical constants and the Fermi-surface deformation bundle
Wave vectors are in units of k_F and energies per particle in Hartree
"""

import math
from dataclasses import dataclass
from functools import lru_cache

from .utils.validation_utils import require, validate_deformation


@dataclass(frozen=True)
class PhysConstants:
    a_V: float
    a_K: float
    ratio_KV: float


@lru_cache(maxsize=None)
def constants():
    """
    Closed-form couplings of the kinetic and exchange energies

    Returns:
        PhysConstants: a_V, a_K and their ratio a_K/a_V
    """
    cube_root = (9 * math.pi / 4) ** (1 / 3)
    a_V = 3 / (32 * math.pi ** 3) * cube_root
    ratio_KV = 2 * math.pi ** 2 * cube_root
    return PhysConstants(a_V=a_V, a_K=a_V * ratio_KV, ratio_KV=ratio_KV)


def gamma0(r_s):
    """Density part of gamma: a_K / (a_V pi r_s)"""
    return constants().ratio_KV / (math.pi * r_s)


def gamma_of(r_s, eps):
    """gamma = ln(2/eps) + a_K / (a_V pi r_s)"""
    return math.log(2 / eps) + gamma0(r_s)


def alpha_of(h):
    """alpha = 2 (h - 1/2)^2 + 1/6"""
    return 2 * (h - 0.5) ** 2 + 1 / 6


def volume_change(eps, h):
    """
    Volume change of the unit sphere when a cap of height eps is removed
    and a cylinder of radius r and height h*eps is put on the cut

    Args:
        eps (float): Cap height
        h (float): Relative cylinder height

    Returns:
        float: Delta V
    """
    cap = math.pi / 3 * eps ** 2 * (3 - eps)
    cylinder = math.pi * eps * (2 - eps) * h * eps
    return cylinder - cap


def volume_scale(eps, h):
    """
    Scale R restoring the electron density: R^3 * |F| = 4 pi / 3

    Args:
        eps (float): Cap height in (0, 1)
        h (float): Relative cylinder height in [0, 1]

    Returns:
        float: R
    """
    return math.exp(-math.log1p(3 * volume_change(eps, h) / (4 * math.pi)) / 3)


def volume_scale_power_minus_one(eps, h, power):
    """R**power - 1 without cancellation for small deformations"""
    return math.expm1(-power / 3 * math.log1p(3 * volume_change(eps, h) / (4 * math.pi)))


@dataclass(frozen=True)
class Deformation:
    """
    Truncated-sphere-plus-cylinder deformation and its derived scalars

    r_sq is kept as eps (2 - eps) so it stays exact for the tiny eps of the
    high-density limit.
    """
    r_s: float
    eps: float
    h: float
    gamma: float
    gamma0: float
    alpha: float
    Q: float
    r: float
    R: float

    @property
    def r_sq(self):
        return self.eps * (2 - self.eps)

    @property
    def r4(self):
        return self.r_sq ** 2

    @property
    def x_limit(self):
        """Upper limit 1/r of the scaled coordinate"""
        return 1 / self.r


def deformation(r_s, eps, h):
    """
    Build the deformation bundle for (r_s, eps, h)

    Args:
        r_s (float): Density parameter (> 0)
        eps (float): Cap depth in (0, 1)
        h (float): Cylinder height parameter in [0, 1]

    Returns:
        Deformation: All derived quantities populated
    """
    require(validate_deformation(r_s, eps, h))
    g0 = gamma0(float(r_s))
    return Deformation(
        r_s=float(r_s),
        eps=float(eps),
        h=float(h),
        gamma=math.log(2 / eps) + g0,
        gamma0=g0,
        alpha=alpha_of(h),
        Q=2 * (1 - eps + h * eps),
        r=math.sqrt(eps * (2 - eps)),
        R=volume_scale(eps, h),
    )
