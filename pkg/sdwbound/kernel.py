"""
Scaled 1-D coordinate system and the exchange kernels of the cylinder model

x = (Q/2 - k_z) / r measures the distance below the top disk in units of the
cylinder radius. On a logarithmic x grid the operators

    (T+- f)(x) = pi * int_0^{1/r} dx' (G(x - x') +- G(x + x')) f(x')

are discretized by a Nystrom rule with singularity subtraction on the
diagonal and a local zeta-function correction of the punctured trapezoid
sum, which keeps every matrix entry nonnegative.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import zeta
from scipy.stats import qmc

from .asymptotics import gamma_prime, x0 as plateau_scale
from .config import GridSettings
from .errors import ParameterDomainError
from .utils.validation_utils import require, validate_positive

logger = logging.getLogger(__name__)

# int_0^inf G(x) dx
HALF_KERNEL_MASS = 8 / 3
# x^2 G(x) stays below this beyond x = 10
TAIL_CONSTANT = 1.01
MAX_GRID_POINTS = 100_000
# zeta'(-2) and zeta(-3)
ZETA_PRIME_M2 = -float(zeta(3)) / (4 * math.pi ** 2)
ZETA_M3 = 1 / 120
# below this |x| the integral of G uses the form without the 8/3 cancellation
SMALL_INTEGRAL_LIMIT = 1.0
# local corrections apply while x h stays below this (kernel resolved by the grid)
RESOLVED_STEP = 1.0


def disk_kernel(x):
    """
    Disk-disk interaction kernel G(x) = 2 ln(1 + 2/(|x| u)) - 4/u^2, u = |x| + sqrt(x^2 + 4)

    Written with log1p and 2/(x^2 + 2 + |x| sqrt(x^2 + 4)) = 4/u^2 so that
    neither the small-x logarithm nor the 1/x^2 tail cancels. G(0) = +inf.

    Args:
        x (float or ndarray): Scaled distance

    Returns:
        float or ndarray: G(x)
    """
    t = np.abs(np.asarray(x, dtype=float))
    s = np.sqrt(t * t + 4)
    with np.errstate(divide='ignore'):
        value = 2 * np.log1p(2 / (t * (s + t))) - 2 / (t * t + 2 + t * s)
    return value if value.ndim else float(value)


def disk_kernel_integral(t):
    """
    Closed form of int_0^t G(x) dx (odd in t, tends to 8/3)

    With G(x) = 2 asinh(x/2) - 2 ln x - 1 - x^2/2 + x sqrt(x^2 + 4)/2 the integral is

        t (1 + 2 asinh(t/2) - 2 ln t - t^2/6) + t^4 (s + 4) / (6 (s + 2)^2),  s = sqrt(t^2 + 4)

    which is used below |t| = 1. Above it the form 8/3 - (tail) is free of cancellation.

    Args:
        t (float or ndarray): Upper limit

    Returns:
        float or ndarray: The integral
    """
    t = np.asarray(t, dtype=float)
    a = np.abs(t)
    s = np.sqrt(a * a + 4)
    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        log_a = np.log(np.where(a > 0, a, 1.0))
        small = (a * (1 + 2 * np.arcsinh(a / 2) - 2 * log_a - a * a / 6)
                 + a ** 4 * (s + 4) / (6 * (s + 2) ** 2))
        log_part = np.where(a > 0, 2 * a * np.log1p(2 / (a * (s + a))), 0.0)
        large = log_part - (4 * a / (s + a) + 16) / (3 * (s + a)) + HALF_KERNEL_MASS
    value = np.sign(t) * np.where(a < SMALL_INTEGRAL_LIMIT, small, large)
    return value if value.ndim else float(value)


def disk_kernel_qmc(x, n_points=2 ** 14, n_scrambles=8, seed=0):
    """
    Randomized quasi-Monte-Carlo estimate of the normalized disk integral

        G(x) = (1/pi^2) int_{|q|,|q'|<1} dq dq' / (x^2 + |q - q'|^2)

    Args:
        x (float): Scaled distance (> 0)
        n_points (int): Sobol points per scramble (power of two)
        n_scrambles (int): Independent scrambles used for the error bar
        seed (int): Seed of the scrambling

    Returns:
        tuple: (estimate, standard_error)
    """
    rng = np.random.default_rng(seed)
    estimates = []
    for _ in range(n_scrambles):
        sample = qmc.Sobol(d=4, scramble=True, seed=rng).random(n_points)
        rad1, ang1 = np.sqrt(sample[:, 0]), 2 * np.pi * sample[:, 1]
        rad2, ang2 = np.sqrt(sample[:, 2]), 2 * np.pi * sample[:, 3]
        dx = rad1 * np.cos(ang1) - rad2 * np.cos(ang2)
        dy = rad1 * np.sin(ang1) - rad2 * np.sin(ang2)
        estimates.append(np.mean(1 / (x * x + dx * dx + dy * dy)))
    estimates = np.array(estimates)
    return float(estimates.mean()), float(estimates.std(ddof=1) / math.sqrt(n_scrambles))


def sphere_potential(k):
    """
    Potential of the uniform unit sphere for the 1/|k - k'|^2 interaction

        v(k) = 2 pi + pi (1 - k^2)/k ln((1 + k)/|1 - k|)

    with the continuous values v(0) = 4 pi and v(1) = 2 pi.

    Args:
        k (float or ndarray): Distance from the center (>= 0)

    Returns:
        float or ndarray: v(k)
    """
    k = np.asarray(k, dtype=float)
    inner = np.minimum(k, 1 / np.maximum(k, 1e-300))
    with np.errstate(divide='ignore', invalid='ignore'):
        # ln((1+k)/|1-k|) = 2 atanh(min(k, 1/k))
        log_over_k = np.where(k < 1e-8, 2.0, 2 * np.arctanh(inner) / np.where(k > 0, k, 1.0))
        value = 2 * np.pi + np.pi * (1 - k * k) * log_over_k
    value = np.where(k == 1, 2 * np.pi, value)
    return value if value.ndim else float(value)


def gap_function(x, deformation):
    """
    Kinetic-plus-potential cost g(x) = gamma x - 2 x ln x (without the 2 pi r factor)

    Args:
        x (float or ndarray): Scaled distance (> 0)
        deformation (Deformation): Supplies gamma

    Returns:
        float or ndarray: g(x), with g(0) = 0
    """
    return gap_values(x, deformation.gamma)


def gap_values(x, gamma):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide='ignore', invalid='ignore'):
        value = np.where(x > 0, gamma * x - 2 * x * np.log(np.where(x > 0, x, 1.0)), 0.0)
    return value if value.ndim else float(value)


@dataclass(frozen=True)
class RadialGrid:
    """
    Logarithmic nodes on [x_min, x_max] with trapezoid weights in ln x

    The last weight closes the rule so that the weights sum to x_max - x_min.
    """
    nodes: np.ndarray
    weights: np.ndarray
    x_min: float
    x_max: float
    points_per_decade: int
    tail_bound: float = 0.0

    @property
    def size(self):
        return len(self.nodes)

    @property
    def decades(self):
        return math.log10(self.x_max / self.x_min)

    @property
    def step(self):
        """Node spacing h in ln x"""
        return math.log(self.x_max / self.x_min) / (self.size - 1)

    def inner(self, f, g):
        """Weighted scalar product (f, g) = sum_i w_i f_i g_i"""
        return float(np.dot(self.weights, np.asarray(f) * np.asarray(g)))

    def norm(self, f):
        return math.sqrt(self.inner(f, f))


def log_grid(x_min, x_max, points_per_decade, tail_bound=0.0):
    """
    Build a RadialGrid between explicit bounds

    Args:
        x_min (float): Smallest node (> 0)
        x_max (float): Largest node
        points_per_decade (int): Nodes per factor of ten
        tail_bound (float): Neglected kernel mass beyond x_max, for the record

    Returns:
        RadialGrid: The grid
    """
    if points_per_decade < 8:
        raise ParameterDomainError(f"points_per_decade must be at least 8, got {points_per_decade}")
    if not 0 < x_min < x_max:
        raise ParameterDomainError(f"Grid bounds must satisfy 0 < x_min < x_max, got {x_min}, {x_max}")
    log_min, log_max = math.log(x_min), math.log(x_max)
    decades = (log_max - log_min) / math.log(10)
    if not math.isfinite(decades) or decades * points_per_decade > MAX_GRID_POINTS:
        raise ParameterDomainError(
            f"Grid dynamic range {x_min:.3e}..{x_max:.3e} is not representable")

    n = max(int(math.ceil(decades * points_per_decade)) + 1, 3)
    u = np.linspace(log_min, log_max, n)
    step = u[1] - u[0]
    nodes = np.exp(u)
    nodes[0], nodes[-1] = x_min, x_max

    weights = nodes * step
    weights[0] *= 0.5
    weights[-1] = 0.0
    weights[-1] = (x_max - x_min) - weights[:-1].sum()
    if weights[-1] <= 0:
        raise ParameterDomainError("Grid too coarse: closing weight is not positive")

    nodes.setflags(write=False)
    weights.setflags(write=False)
    return RadialGrid(nodes=nodes, weights=weights, x_min=float(x_min), x_max=float(x_max),
                      points_per_decade=int(points_per_decade), tail_bound=float(tail_bound))


def tail_bound(x_max, r):
    """Upper bound pi * 1.01 * (1/x_max - r) on the kernel mass cut off beyond x_max"""
    return max(math.pi * TAIL_CONSTANT * (1 / x_max - r), 0.0)


def build_grid(deformation, settings=None, tol=1e-10, extra_decades=0):
    """
    Logarithmic grid adapted to the plateau scale of the current gamma

    Args:
        deformation (Deformation): Supplies gamma and r
        settings (GridSettings): Density and bound policy
        tol (float): Solver tolerance the cut-off tail must stay below
        extra_decades (int): Decades added below the seeded x_min

    Returns:
        RadialGrid: The grid
    """
    settings = settings or GridSettings()
    require(validate_positive('tol', tol, upper=1))

    x0_est = plateau_scale(gamma_prime(deformation.gamma))
    x_min = max(x0_est * settings.x_min_factor * 10.0 ** (-extra_decades), 1e-300)

    x_cut = settings.x_max_cut if settings.x_max_cut > 0 else math.pi * TAIL_CONSTANT / tol
    x_max = min(deformation.x_limit, x_cut)
    if x_max <= x_min:
        raise ParameterDomainError(f"x_max={x_max:.3e} does not exceed x_min={x_min:.3e}")

    bound = tail_bound(x_max, deformation.r)
    if bound > tol:
        raise ParameterDomainError(
            f"Cut-off tail bound {bound:.3e} exceeds the solver tolerance {tol:.1e}; raise grid.x_max_cut")

    grid = log_grid(x_min, x_max, settings.points_per_decade, tail_bound=bound)
    logger.debug("📐 Grid: %d nodes over %.1f decades [%.3e, %.3e]",
                 grid.size, grid.decades, x_min, x_max)
    return grid


@dataclass(frozen=True)
class DiscreteOperator:
    """Nystrom matrix of T+ or T- on a RadialGrid"""
    matrix: np.ndarray
    grid: RadialGrid
    sign: int
    bad_rows: tuple = ()

    def apply(self, f):
        return self.matrix @ np.asarray(f, dtype=float)

    __call__ = apply


def singular_row_integrals(grid):
    """I_G(x_i) = int_{x_min}^{x_max} G(x_i - x') dx' for every node"""
    x = grid.nodes
    return disk_kernel_integral(x - grid.x_min) + disk_kernel_integral(grid.x_max - x)


def local_correction(grid):
    """
    Tridiagonal correction of the punctured trapezoid sum over G(x_i - x')

    In u = ln x' the subtracted row integrand is (-2 ln|v| + |v| beta(v) + smooth) psi(v),
    v = u - u_i, psi(0) = 0, beta(0) = 2 x_i, beta'(0) = x_i. The zeta-function terms
    of the trapezoid rule with the node v = 0 left out,

        +2 |zeta'(-2)| h^3 psi''(0)   and   -zeta(-3) h^4 (beta psi)''(0),

    add up to (1/x) d/du (x^2 a(x) df/du) with a(x) = 2 |zeta'(-2)| h^3 - 2 zeta(-3) h^4 x.
    The divergence form keeps W C symmetric and its off-diagonal entries nonnegative.
    Faces touching the first or last node, and faces with x h > 1 where the kernel
    is not resolved, carry no correction.

    Args:
        grid (RadialGrid): Discretization

    Returns:
        ndarray: (n, n) correction, without the pi prefactor of T+-
    """
    x, w = grid.nodes, grid.weights
    h = grid.step
    middle = np.sqrt(x[:-1] * x[1:])
    a = 2 * abs(ZETA_PRIME_M2) * h ** 3 - 2 * ZETA_M3 * h ** 4 * middle
    flux = np.where(middle * h <= RESOLVED_STEP, middle * middle * a / h, 0.0)
    flux[[0, -1]] = 0.0

    n = grid.size
    upper = np.arange(n - 1)
    correction = np.zeros((n, n))
    correction[upper, upper + 1] = flux / w[:-1]
    correction[upper + 1, upper] = flux / w[1:]
    correction[np.diag_indices(n)] = -(np.append(flux, 0.0) + np.insert(flux, 0, 0.0)) / w
    return correction


def assemble_operator(grid, sign, deformation=None):
    """
    Assemble the Nystrom matrix of T+ (sign=+1) or T- (sign=-1)

    The log singularity of G(x_i - x') is subtracted:
        int G(x_i - x') f(x') dx' = int G(x_i - x') (f(x') - f(x_i)) dx' + f(x_i) I_G(x_i)
    so the diagonal carries pi (I_G(x_i) - sum_{j != i} w_j G(x_i - x_j)), and the
    remaining sum is corrected by local_correction. Negative diagonal entries above
    the cut-off tail level pi * 1.01 / x_max are quadrature noise and are set to zero;
    deeper ones are reported as bad rows.

    Args:
        grid (RadialGrid): Discretization
        sign (int): +1 or -1
        deformation (Deformation): Unused by the kernel itself, accepted for symmetry with build_grid

    Returns:
        DiscreteOperator: The assembled operator
    """
    if sign not in (1, -1):
        raise ParameterDomainError(f"sign must be +1 or -1, got {sign}")

    x, w = grid.nodes, grid.weights
    difference = x[:, None] - x[None, :]
    np.fill_diagonal(difference, 1.0)
    direct = disk_kernel(difference)
    np.fill_diagonal(direct, 0.0)

    mirror = disk_kernel(x[:, None] + x[None, :])
    matrix = np.pi * ((direct + sign * mirror) * w[None, :] + local_correction(grid))
    diagonal = matrix.diagonal() + np.pi * (singular_row_integrals(grid)
                                            - (direct * w[None, :]).sum(axis=1))
    floor = np.pi * TAIL_CONSTANT / grid.x_max
    bad_rows = tuple(int(i) for i in np.flatnonzero(diagonal < -floor))
    matrix[np.diag_indices_from(matrix)] = np.where((diagonal < 0) & (diagonal >= -floor), 0.0, diagonal)
    if bad_rows:
        logger.warning("⚠️ %d rows failed the singular-integral check (negative diagonal): %s",
                       len(bad_rows), bad_rows[:10])

    matrix.setflags(write=False)
    return DiscreteOperator(matrix=matrix, grid=grid, sign=sign, bad_rows=bad_rows)


def assemble_operators(grid, deformation=None):
    """Both operators on the same grid, as a (T+, T-) pair"""
    return assemble_operator(grid, 1, deformation), assemble_operator(grid, -1, deformation)


def apply_operator_quad(f, x, sign, x_min, x_max, epsrel=1e-10):
    """
    Reference value of (T+- f)(x) by adaptive quadrature, integrating in ln x'

    Args:
        f (callable): Smooth test function of x'
        x (float): Evaluation point inside [x_min, x_max]
        sign (int): +1 or -1
        x_min, x_max (float): Integration range

    Returns:
        float: pi * int (G(x - x') +- G(x + x')) f(x') dx'
    """
    def integrand(u):
        xp = math.exp(u)
        return (disk_kernel(x - xp) + sign * disk_kernel(x + xp)) * f(xp) * xp

    total = 0.0
    log_x = math.log(x)
    for a, b in ((math.log(x_min), log_x), (log_x, math.log(x_max))):
        if b > a:
            value, _ = integrate.quad(integrand, a, b, limit=400, epsabs=0.0, epsrel=epsrel)
            total += value
    return math.pi * total
