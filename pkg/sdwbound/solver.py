"""
Fixed-point solver for the SDW amplitude xi = ab on the scaled x grid

J(xi) = (1/2) T+xi / sqrt(pi^2 g^2 + (T+xi)^2) is monotone and bounded by 1/2,
so iterating from xi = 1/2 gives a pointwise nonincreasing sequence that
converges to the largest fixed point.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .config import RunConfig
from .errors import NonConvergenceError, NumericalConsistencyError
from .kernel import assemble_operators, build_grid, gap_values
from .params import constants
from .utils.validation_utils import require, validate_positive

logger = logging.getLogger(__name__)

MONOTONE_SLACK = 1e-12
PLATEAU_LEVEL = 0.499
TRIVIAL_LEVEL = 1e-8
NEGLECT_WARNING_FRACTION = 0.1


@dataclass(frozen=True)
class SdwSolution:
    xi: np.ndarray
    b_sq: np.ndarray
    iterations: int
    residual: float
    plateau_ok: bool

    @property
    def trivial(self):
        """True when the iteration collapsed onto the Fermi-gas fixed point"""
        return bool(np.max(self.xi) < TRIVIAL_LEVEL)


@dataclass(frozen=True)
class SdwEnergy:
    delta_e_scaled: float
    delta_e: float
    neglected_term: float
    gap_term: float
    exchange_term: float
    warnings: tuple = field(default=())

    @property
    def delta_e_full(self):
        """Scaled bound with the (T- b^2, b^2) term kept"""
        return self.delta_e_scaled - self.neglected_term


def b_squared(xi):
    """
    Minority weight b^2 = (1 - sqrt(1 - 4 xi^2)) / 2, the branch with b < a

    Evaluated as 2 xi^2 / (1 + sqrt(1 - 4 xi^2)) to stay accurate for small xi.

    Args:
        xi (float or ndarray): Amplitude in [0, 1/2]

    Returns:
        float or ndarray: b^2 in [0, 1/2]
    """
    xi = np.asarray(xi, dtype=float)
    root = np.sqrt(np.clip(1 - 4 * xi * xi, 0.0, None))
    value = 2 * xi * xi / (1 + root)
    return value if value.ndim else float(value)


def apply_J(xi, gap, t_plus):
    """
    One application of the monotone map J

    Args:
        xi (ndarray): Current amplitude on the grid nodes
        gap (ndarray): g(x) = gamma x - 2 x ln x on the nodes
        t_plus (DiscreteOperator): Assembled T+

    Returns:
        ndarray: J(xi)
    """
    t_xi = t_plus.apply(xi)
    denominator = np.sqrt((np.pi * gap) ** 2 + t_xi ** 2)
    with np.errstate(invalid='ignore', divide='ignore'):
        value = np.where(denominator > 0, 0.5 * t_xi / denominator, 0.0)
    return np.clip(value, 0.0, 0.5)


def solve_fixed_point(deformation, grid, operators, tol=1e-10, max_iter=5000, relaxation=1.0):
    """
    Iterate xi_{n+1} = J(xi_n) from xi_0 = 1/2 until sup |xi_{n+1} - xi_n| < tol

    With relaxation != 1 the steps are xi + relaxation (J(xi) - xi); the run then
    ends with two plain steps that must be monotone again.

    Args:
        deformation (Deformation): Supplies gamma
        grid (RadialGrid): Discretization
        operators (tuple): (T+, T-) on the grid
        tol (float): Sup-norm stopping tolerance
        max_iter (int): Iteration budget
        relaxation (float): Step factor, 1 for the plain iteration

    Returns:
        SdwSolution: Converged amplitude and diagnostics
    """
    require(validate_positive('tol', tol))
    t_plus = operators[0]
    gap = gap_values(grid.nodes, deformation.gamma)
    plain = relaxation == 1.0

    xi = np.full(grid.size, 0.5)
    residual = math.inf
    for iteration in range(1, max_iter + 1):
        image = apply_J(xi, gap, t_plus)
        step = image - xi
        residual = float(np.max(np.abs(step)))
        if plain and np.max(step) > MONOTONE_SLACK:
            raise NumericalConsistencyError(
                f"Iteration {iteration} increased xi by {np.max(step):.3e} (monotone sequence violated)")
        if residual < tol:
            if not plain:
                _certify(xi, gap, t_plus)
            logger.debug("✅ Fixed point after %d iterations (residual %.2e)", iteration, residual)
            return _solution(xi, iteration, residual)
        xi = image if plain else np.clip(xi + relaxation * step, 0.0, 0.5)
        if iteration % 100 == 0:
            logger.debug("🔁 iteration %d, residual %.3e", iteration, residual)

    raise NonConvergenceError(
        f"No fixed point within {max_iter} iterations (last residual {residual:.3e})",
        iterations=max_iter, residual=residual)


def _certify(xi, gap, t_plus):
    current = xi
    for _ in range(2):
        image = apply_J(current, gap, t_plus)
        if np.max(image - current) > MONOTONE_SLACK:
            raise NumericalConsistencyError("Relaxed iteration ended below the fixed point")
        current = image


def _solution(xi, iterations, residual):
    xi = np.array(xi, dtype=float)
    b_sq = b_squared(xi)
    xi.setflags(write=False)
    b_sq.setflags(write=False)
    return SdwSolution(xi=xi, b_sq=b_sq, iterations=iterations, residual=residual,
                       plateau_ok=bool(xi[0] >= PLATEAU_LEVEL))


def sdw_energy(deformation, grid, solution, operators, use_volume_scale=False):
    """
    Upper bound on the SDW energy from a converged amplitude

        dE_ub = 2 pi (g, b^2) - (T+ xi, xi),   Delta E_SDW = (4 pi a_V r^4 / r_s) dE_ub

    The (T- b^2, b^2) term is dropped from the bound and reported separately.

    Args:
        deformation (Deformation): Parameter bundle
        grid (RadialGrid): Discretization
        solution (SdwSolution): Converged amplitude
        operators (tuple): (T+, T-)
        use_volume_scale (bool): Multiply Delta E_SDW by R^4

    Returns:
        SdwEnergy: Bound, Hartree value and diagnostics
    """
    t_plus, t_minus = operators
    if solution.trivial:
        return SdwEnergy(0.0, 0.0, 0.0, 0.0, 0.0, warnings=('trivial fixed point',))

    gap = gap_values(grid.nodes, deformation.gamma)
    gap_term = 2 * np.pi * grid.inner(gap, solution.b_sq)
    exchange_term = grid.inner(t_plus.apply(solution.xi), solution.xi)
    neglected = grid.inner(t_minus.apply(solution.b_sq), solution.b_sq)
    scaled = gap_term - exchange_term

    prefactor = 4 * np.pi * constants().a_V * deformation.r4 / deformation.r_s
    if use_volume_scale:
        prefactor *= deformation.R ** 4

    warnings = []
    if neglected > NEGLECT_WARNING_FRACTION * abs(scaled):
        warnings.append(f"neglected (T-b2,b2) term is {neglected / abs(scaled):.0%} of |dE|")
        logger.warning("⚠️ %s at r_s=%g", warnings[-1], deformation.r_s)

    return SdwEnergy(delta_e_scaled=scaled, delta_e=prefactor * scaled, neglected_term=neglected,
                     gap_term=gap_term, exchange_term=exchange_term, warnings=tuple(warnings))


@dataclass(frozen=True)
class SolveResult:
    deformation: object
    grid: object
    operators: tuple
    solution: SdwSolution
    energy: SdwEnergy
    extensions: int


def solve(deformation, config=None):
    """
    Full pipeline for one deformation: grid, operators, fixed point, energy

    If the plateau xi(x_min) >= 0.499 is not reached, the grid is extended one
    decade downwards and the solve repeats, up to grid.max_extensions times.

    Args:
        deformation (Deformation): Parameter bundle
        config (RunConfig): Settings

    Returns:
        SolveResult: Everything needed for reports and exports
    """
    config = config or RunConfig()
    extensions = 0
    while True:
        grid = build_grid(deformation, config.grid, tol=config.solver.tol, extra_decades=extensions)
        operators = assemble_operators(grid, deformation)
        solution = solve_fixed_point(deformation, grid, operators, tol=config.solver.tol,
                                     max_iter=config.solver.max_iter,
                                     relaxation=config.solver.relaxation)
        if solution.plateau_ok or solution.trivial or extensions >= config.grid.max_extensions:
            break
        extensions += 1
        logger.info("⚠️ Plateau not reached (xi(x_min)=%.4f), extending the grid one decade", solution.xi[0])

    if not solution.plateau_ok and not solution.trivial:
        logger.warning("⚠️ Plateau still not reached after %d extensions", extensions)

    energy = sdw_energy(deformation, grid, solution, operators,
                        use_volume_scale=config.solver.use_volume_scale)
    return SolveResult(deformation=deformation, grid=grid, operators=operators,
                       solution=solution, energy=energy, extensions=extensions)
