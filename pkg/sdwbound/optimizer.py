"""
Total-energy minimization over the deformation eps and the (r_s, h) scans built on it
"""

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from joblib import Parallel, delayed
from threadpoolctl import threadpool_limits
from tqdm import tqdm

from .asymptotics import eps0, log_eps0, log_eps0_refined, scaled_asym_total
from .config import RunConfig
from .errors import OptimizationDomainError, SdwBoundError
from .fermi_gas import delta_e_fg_leading
from .params import constants, deformation
from .solver import solve
from .utils.validation_utils import require, validate_deformation, validate_supported_rs

logger = logging.getLogger(__name__)

# 1 / golden ratio
INV_PHI = 2 / (1 + math.sqrt(5))
INTERIOR_STEP = 0.05
MAX_EPS = 0.5


@dataclass(frozen=True)
class EnergyReport:
    """Energies in Hartree per particle at one (r_s, eps, h) point"""
    r_s: float
    h: float
    eps_star: float
    eps0: float
    eps_ratio: float
    delta_e_fg: float
    delta_e_sdw: float
    delta_e_total: float
    scaled_energy: float
    iterations: int
    residual: float
    plateau_ok: bool = True
    no_sdw: bool = False
    neglected_term: float = 0.0
    grid_points: int = 0
    warnings: tuple = field(default=())

    def as_dict(self):
        values = asdict(self)
        values['warnings'] = '; '.join(self.warnings)
        return values


@dataclass(frozen=True)
class ScanRow:
    r_s: float
    h: float
    report: EnergyReport = None
    scaled_asym: float = math.nan
    error: str = ''

    def as_dict(self):
        """Flat record with the CSV column names"""
        values = {'r_s': self.r_s, 'h': self.h}
        if self.report is not None:
            report = self.report.as_dict()
            report.pop('r_s')
            report.pop('h')
            values.update(report)
        values['scaled_asym'] = self.scaled_asym
        values['error'] = self.error
        return values


@dataclass(frozen=True)
class HInfluence:
    r_s: float
    flat: EnergyReport
    half: EnergyReport
    energy_ratio: float
    eps_ratio: float
    fg_ratio: float


def total_energy(r_s, eps, h, config=None):
    """
    Delta E = Delta E_FG + Delta E_SDW at one deformation, without minimization

    Args:
        r_s (float): Density parameter
        eps (float): Deformation
        h (float): Cylinder height parameter
        config (RunConfig): Solver and grid settings

    Returns:
        EnergyReport: Energies and solver diagnostics
    """
    config = config or RunConfig()
    d = deformation(r_s, eps, h)
    return energy_report(d, solve(d, config))


def energy_report(d, result):
    """
    Combine a solver result with the leading-order Fermi-gas cost

    Args:
        d (Deformation): Parameter bundle the result was computed for
        result (SolveResult): Output of solver.solve

    Returns:
        EnergyReport: Energies and solver diagnostics
    """
    fg = delta_e_fg_leading(d)
    sdw = result.energy.delta_e
    total = fg + sdw

    warnings = list(result.energy.warnings)
    no_sdw = result.solution.trivial or total >= 0
    if no_sdw:
        warnings.append('no SDW resolved')
    if not result.solution.plateau_ok and not result.solution.trivial:
        warnings.append('plateau not reached')

    return EnergyReport(
        r_s=d.r_s, h=d.h, eps_star=d.eps,
        eps0=eps0(d.r_s, d.h),
        eps_ratio=d.eps / eps0(d.r_s, 0.5),
        delta_e_fg=fg, delta_e_sdw=sdw, delta_e_total=total,
        scaled_energy=total * d.r_s ** 2 / d.eps ** 3,
        iterations=result.solution.iterations,
        residual=result.solution.residual,
        plateau_ok=result.solution.plateau_ok,
        no_sdw=no_sdw,
        neglected_term=result.energy.neglected_term,
        grid_points=result.grid.size,
        warnings=tuple(warnings),
    )


class _Objective:
    """Delta E as a function of u = ln eps, remembering every sample"""

    def __init__(self, r_s, h, config):
        self.r_s, self.h, self.config = r_s, h, config
        self.reports = {}

    def __call__(self, u):
        if u not in self.reports:
            self.reports[u] = total_energy(self.r_s, math.exp(u), self.h, self.config)
        return self.reports[u].delta_e_total

    def samples(self):
        return sorted((math.exp(u), r.delta_e_total) for u, r in self.reports.items())

    def best(self):
        u = min(self.reports, key=lambda key: (self.reports[key].delta_e_total, key))
        return u, self.reports[u]


def golden_section(f, lower, upper, tol):
    """
    Golden-section search for the minimum of f on [lower, upper]

    Args:
        f (callable): Function of one variable
        lower, upper (float): Bracket
        tol (float): Final bracket width

    Returns:
        tuple: (x_min, lower, upper) with the final bracket
    """
    x1 = upper - INV_PHI * (upper - lower)
    x2 = lower + INV_PHI * (upper - lower)
    f1, f2 = f(x1), f(x2)
    while upper - lower > tol:
        if f2 > f1:
            upper, x2, f2 = x2, x1, f1
            x1 = upper - INV_PHI * (upper - lower)
            f1 = f(x1)
        else:
            lower, x1, f1 = x1, x2, f2
            x2 = lower + INV_PHI * (upper - lower)
            f2 = f(x2)
    return (x1 if f1 <= f2 else x2), lower, upper


def _log_scan(objective, lower, upper, points):
    grid = np.linspace(lower, upper, points)
    values = [objective(float(u)) for u in grid]
    best = int(np.argmin(values))
    return grid, best


def optimize_epsilon(r_s, h, config=None):
    """
    Minimize Delta E(eps) at fixed (r_s, h) by golden-section search in ln eps

    The bracket [e/f, f e] (f = optimizer.bracket_factor) is centered on the
    refined seed e = eps0_refined(r_s, h), one gamma -> eps0(gamma) pass, and is
    moved outwards when the minimum sits on one of its edges. If the samples contradict
    unimodality, a log-spaced scan locates the basin and the search restarts there.

    Args:
        r_s (float): Density parameter in the supported range
        h (float): Cylinder height parameter in [0, 1]
        config (RunConfig): Settings

    Returns:
        EnergyReport: Report at the optimal eps
    """
    config = config or RunConfig()
    require(validate_supported_rs(r_s))
    require(validate_deformation(r_s, 0.5, h))
    settings = config.optimizer

    objective = _Objective(r_s, h, config)
    center = log_eps0_refined(r_s, h)
    spread = math.log(settings.bracket_factor)
    lower, upper = center - spread, min(center + spread, math.log(MAX_EPS))
    tol = settings.rel_tol

    for expansion in range(settings.max_expansions + 1):
        u_star, final_lower, final_upper = golden_section(objective, lower, upper, tol)
        u_best, _ = objective.best()
        if abs(u_best - u_star) > 2 * (final_upper - final_lower) + tol:
            logger.info("⚠️ Delta E(eps) not unimodal at r_s=%g, falling back to a log scan", r_s)
            u_star = _fallback(objective, lower, upper, settings, tol)
            break

        touches_lower = final_lower - lower < 2 * tol
        touches_upper = upper - final_upper < 2 * tol and upper < math.log(MAX_EPS)
        if not (touches_lower or touches_upper):
            break
        if expansion == settings.max_expansions:
            raise OptimizationDomainError(
                f"Minimum of Delta E(eps) at r_s={r_s}, h={h} stays on the bracket edge "
                f"after {settings.max_expansions} expansions", samples=objective.samples())
        if touches_lower:
            lower -= spread
        if touches_upper:
            upper = min(upper + spread, math.log(MAX_EPS))
        logger.info("🔁 Expanding the eps bracket to [%.3e, %.3e]", math.exp(lower), math.exp(upper))

    report = objective.reports[u_star] if u_star in objective.reports else None
    if report is None:
        objective(u_star)
        report = objective.reports[u_star]
    if report.delta_e_total >= 0:
        logger.warning("⚠️ No negative Delta E found at r_s=%g, h=%g", r_s, h)
    logger.debug("📊 r_s=%g h=%g: eps*=%.4e, Delta E=%.4e, %d samples",
                 r_s, h, report.eps_star, report.delta_e_total, len(objective.reports))
    return report


def _fallback(objective, lower, upper, settings, tol):
    grid, best = _log_scan(objective, lower, upper, settings.fallback_points)
    if best in (0, len(grid) - 1):
        raise OptimizationDomainError(
            f"Log scan of Delta E(eps) found its minimum on the edge eps={math.exp(grid[best]):.3e}",
            samples=objective.samples())
    u_star, _, _ = golden_section(objective, grid[best - 1], grid[best + 1], tol)
    return u_star


def interior_check(r_s, h, report, config=None, step=INTERIOR_STEP):
    """
    True when Delta E(eps* e^{+-step}) >= Delta E(eps*) - 1e-12

    Args:
        r_s (float): Density parameter
        h (float): Cylinder height parameter
        report (EnergyReport): Optimizer result
        config (RunConfig): Settings used for the optimization

    Returns:
        bool: Interior optimality of the reported eps
    """
    values = [total_energy(r_s, report.eps_star * math.exp(s), h, config).delta_e_total
              for s in (-step, step)]
    return all(v >= report.delta_e_total - 1e-12 for v in values)


def h_influence(r_s, config=None):
    """
    Compare the flat-top (h = 0) and the optimal-height (h = 1/2) deformations

    Args:
        r_s (float): Density parameter
        config (RunConfig): Settings

    Returns:
        HInfluence: Both reports, Delta E(1/2)/Delta E(0), eps*(1/2)/eps*(0) and
        the leading-order Fermi-gas cost ratio Delta E_FG(0)/Delta E_FG(1/2) at a common eps
    """
    flat = optimize_epsilon(r_s, 0.0, config)
    half = optimize_epsilon(r_s, 0.5, config)
    eps = half.eps_star
    fg_ratio = delta_e_fg_leading(deformation(r_s, eps, 0.0)) / delta_e_fg_leading(deformation(r_s, eps, 0.5))
    return HInfluence(r_s=r_s, flat=flat, half=half,
                      energy_ratio=half.delta_e_total / flat.delta_e_total,
                      eps_ratio=half.eps_star / flat.eps_star,
                      fg_ratio=fg_ratio)


def kgrid_resolves(report, n_k):
    """
    Whether a k mesh with n_k points per k_F can represent the deformation

    Args:
        report (EnergyReport): Optimizer result
        n_k (int): k values per k_F of the periodic simulation

    Returns:
        bool: eps* exceeds one mesh spacing 1/n_k
    """
    return report.eps_star > 1 / n_k


def _scan_row(r_s, h, config):
    with threadpool_limits(limits=1):
        try:
            report = optimize_epsilon(r_s, h, config)
        except SdwBoundError as e:
            logger.error("❌ r_s=%g h=%g: %s", r_s, h, e)
            return ScanRow(r_s=r_s, h=h, error=f"{type(e).__name__}: {e}")
        # closed form at eps0, rescaled from eps0^3 units to Delta E r_s^2 / eps^3
        scaled = scaled_asym_total(r_s, log_eps0(r_s, h), h) * 2 * math.pi ** 2 * constants().a_V * r_s
        return ScanRow(r_s=r_s, h=h, report=report, scaled_asym=scaled)


def iter_scan(rs_list, h_list, config=None, progress=True):
    """
    Yield one ScanRow per (r_s, h) pair, in input order

    Rows are computed independently with joblib; each worker runs BLAS single-threaded.

    Args:
        rs_list (list): r_s values
        h_list (list): h values
        config (RunConfig): run.threads sets the number of workers
        progress (bool): Show a tqdm bar on stderr

    Yields:
        ScanRow: Result or recorded error of one pair
    """
    config = config or RunConfig()
    if not rs_list or not h_list:
        raise SdwBoundError("scan needs nonempty r_s and h lists")
    pairs = [(float(r_s), float(h)) for r_s in rs_list for h in h_list]
    runner = Parallel(n_jobs=config.run.threads, return_as='generator')
    rows = runner(delayed(_scan_row)(r_s, h, config) for r_s, h in pairs)
    yield from tqdm(rows, total=len(pairs), desc='scan', disable=not progress)


def scan(rs_list, h_list, config=None, progress=False):
    """
    Scan table over every (r_s, h) pair, sorted by (r_s, h)

    Returns:
        list: ScanRow entries
    """
    rows = list(iter_scan(rs_list, h_list, config, progress=progress))
    return sort_rows(rows)


def sort_rows(rows):
    return sorted(rows, key=lambda row: (row.r_s, row.h))
