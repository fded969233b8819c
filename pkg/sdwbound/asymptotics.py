"""
Closed-form small-r_s solution of the cylinder model
Used to seed grids and brackets and to validate the numerical solver
"""

import math
from dataclasses import dataclass

import numpy as np

from .params import alpha_of, constants, gamma0, gamma_of
from .utils.validation_utils import require, validate_deformation, validate_positive

# 8 exp(-3/2 - pi^2/8)
C_CONSTANT = 8 * math.exp(-1.5 - math.pi ** 2 / 8)


@dataclass(frozen=True)
class AsymptoticSolution:
    gamma_prime: float
    x0: float
    C: float
    eps0: float
    delta_e_sdw: float
    delta_e_min: float
    scaled_constant: float


def gamma_prime(gamma):
    """
    Shifted coupling gamma' solving 2 pi sqrt(2) (gamma' - gamma) = sqrt(gamma) (pi^2 + 4)

    Args:
        gamma (float): gamma >= 0

    Returns:
        float: gamma'
    """
    return gamma + math.sqrt(gamma) * (math.pi ** 2 + 4) / (2 * math.pi * math.sqrt(2))


def x0(gamma_p):
    """Plateau scale x0 = 2 exp(-(pi / (2 sqrt 2)) sqrt(gamma') - 1/2)"""
    return 2 * math.exp(-math.pi / (2 * math.sqrt(2)) * math.sqrt(gamma_p) - 0.5)


def first_zero(gamma_p):
    """Position of the first zero of the asymptotic profile"""
    return x0(gamma_p) * math.sinh(math.pi / 2 * math.sqrt(gamma_p / 2))


def xi_asymptotic(x, gamma_p):
    """
    Approximate fixed point xi(x) = cos(sqrt(2/gamma') asinh(x/x0)) / (2 sqrt(x^2/x0^2 + 1))

    Clipped to zero beyond the first zero of the cosine.

    Args:
        x (float or ndarray): Scaled distance (>= 0)
        gamma_p (float): gamma'

    Returns:
        float or ndarray: xi(x)
    """
    scale = x0(gamma_p)
    ratio = np.asarray(x, dtype=float) / scale
    phase = math.sqrt(2 / gamma_p) * np.arcsinh(ratio)
    value = np.where(phase < math.pi / 2, 0.5 * np.cos(phase) / np.sqrt(ratio * ratio + 1), 0.0)
    return value if value.ndim else float(value)


def log_eps0(r_s, h):
    """
    ln of the asymptotic optimal deformation

        eps0 = (2C / (3 alpha)) exp(-pi^2/4 - pi sqrt(gamma0 / 2))

    Args:
        r_s (float): Density parameter (> 0)
        h (float): Cylinder height parameter

    Returns:
        float: ln eps0
    """
    require(validate_positive('r_s', r_s))
    return (math.log(2 * C_CONSTANT / (3 * alpha_of(h)))
            - math.pi ** 2 / 4 - math.pi * math.sqrt(gamma0(r_s) / 2))


def eps0(r_s, h):
    """Asymptotic optimal deformation eps0(r_s, h)"""
    return math.exp(log_eps0(r_s, h))


def eps0_fitted(r_s, h):
    """Rounded form 0.0294 exp(-7.714 / sqrt(r_s)) / alpha"""
    return 0.0294 * math.exp(-7.714 / math.sqrt(r_s)) / alpha_of(h)


def log_eps0_refined(r_s, h):
    """
    One self-consistent pass gamma -> eps0(gamma) -> gamma

    Uses the stationary point eps = 2C exp(-pi sqrt(gamma/2)) / (3 alpha) of the
    closed-form total energy with gamma evaluated at the first-principles eps0.
    """
    gamma = gamma0(r_s) + math.log(2) - log_eps0(r_s, h)
    return math.log(2 * C_CONSTANT / (3 * alpha_of(h))) - math.pi * math.sqrt(gamma / 2)


def eps0_refined(r_s, h):
    return math.exp(log_eps0_refined(r_s, h))


def sdw_asym(r_s, eps, h):
    """
    Asymptotic SDW energy bound and the small-r_s total energy

    Args:
        r_s (float): Density parameter
        eps (float): Deformation
        h (float): Cylinder height parameter

    Returns:
        tuple: (delta_e_sdw bound, delta_e_min = -pi a_K alpha eps^3 / r_s^2)
    """
    require(validate_deformation(r_s, eps, h))
    c = constants()
    gamma = gamma_of(r_s, eps)
    bound = (-C_CONSTANT * 2 * math.pi ** 2 * c.a_V / r_s * eps ** 2 * gamma
             * math.exp(-math.pi * math.sqrt(gamma / 2)))
    minimum = -math.pi * c.a_K * alpha_of(h) * eps ** 3 / r_s ** 2
    return bound, minimum


def delta_e_asym_total(r_s, eps, h):
    """
    Closed-form total energy (2 pi^2 a_V gamma eps^2 / r_s)(eps alpha - C exp(-pi sqrt(gamma/2)))

    Args:
        r_s (float): Density parameter
        eps (float): Deformation
        h (float): Cylinder height parameter

    Returns:
        float: Delta E in Hartree per particle
    """
    require(validate_deformation(r_s, eps, h))
    gamma = gamma_of(r_s, eps)
    prefactor = 2 * math.pi ** 2 * constants().a_V * gamma * eps ** 2 / r_s
    return prefactor * (eps * alpha_of(h) - C_CONSTANT * math.exp(-math.pi * math.sqrt(gamma / 2)))


def scaled_asym_total(r_s, log_eps, h):
    """
    Closed-form total energy divided by (2 pi^2 a_V / r_s) eps0^3, evaluated from ln eps

    Every factor stays of order one, so r_s far below the float range of eps0 can be studied.

    Args:
        r_s (float): Density parameter
        log_eps (float): ln eps
        h (float): Cylinder height parameter

    Returns:
        float: Scaled Delta E
    """
    base = log_eps0(r_s, h)
    rel = math.exp(log_eps - base)
    gamma = gamma0(r_s) + math.log(2) - log_eps
    exp_term = math.exp(-math.pi * math.sqrt(gamma / 2) - base)
    return gamma * rel ** 2 * (rel * alpha_of(h) - C_CONSTANT * exp_term)


def scaled_constant(h=0.5):
    """Small-r_s limit of Delta E r_s^2 / eps^3, i.e. -pi a_K alpha"""
    return -math.pi * constants().a_K * alpha_of(h)


def asymptotic_solution(r_s, eps, h):
    """
    Bundle every asymptotic quantity for one parameter point

    Args:
        r_s (float): Density parameter
        eps (float): Deformation
        h (float): Cylinder height parameter

    Returns:
        AsymptoticSolution: gamma', x0, C, eps0 and both energies
    """
    bound, minimum = sdw_asym(r_s, eps, h)
    gp = gamma_prime(gamma_of(r_s, eps))
    return AsymptoticSolution(
        gamma_prime=gp,
        x0=x0(gp),
        C=C_CONSTANT,
        eps0=eps0(r_s, h),
        delta_e_sdw=bound,
        delta_e_min=minimum,
        scaled_constant=scaled_constant(h),
    )
