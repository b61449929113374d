"""The radial mixing operator linking the fixed-trace and GUE level densities.

Writing a GUE spectrum as r·v with |v| = 1, the radius and the direction are
independent and

    σ_GUE(x) = 2/Γ(N²/2) ∫_{|x|}^∞ e^{−r²} r^{N²−2} σ_v(x/r) dr.

This module applies the right-hand side to a tabulated σ_v, checks it
against the exact Hermite-sum density, and derives the x=0 relation and the
semicircle limit of the rescaled fixed-trace density.
"""

import math
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from ..core.config import get_settings
from ..core.constants import (
    BULK_WINDOW,
    FORWARD_MASS_DRIFT,
    PREFACTOR_LOG_TOLERANCE,
    RADIAL_HALF_WIDTH,
    RHO_WINDOW,
)
from ..core.logger import logger
from ..schemas.density import DensityGrid
from ..schemas.manifest import SamplingPlan
from ..schemas.radial import RadialWeight
from ..schemas.report import (
    IntegralEquationReport,
    SemicircleReport,
    SemicircleRow,
    SigmaZeroReport,
)
from ..schemas.spectrum import Ensemble
from ..utils.decorators import log_execution_time
from ..utils.exceptions import DomainError, InconsistencyError, NumericalFailureError
from ..utils.quadrature import gauss_legendre_mesh, trapezoid
from . import selberg_service
from .gue_service import (
    default_support,
    gue_grid,
    gue_level_density,
    scale_fixed_trace_to_rho,
    scale_gue_to_rho,
    semicircle,
)
from .sampler_service import MonteCarloService
from .specfun_service import gamma_ratio, log_gamma, regularized_lower_gamma, regularized_upper_gamma

MAX_VERIFY_SIZE = 50
SIGMA_ZERO_MODES = ("exact_relation", "paper_asymptotic")


def _check_window(a: float, b: float) -> None:
    if a < 0 or not a <= b:
        raise DomainError(f"need 0 <= a <= b, got a={a}, b={b}")


def radial_mass(w: RadialWeight, a: float, b: float = math.inf) -> float:
    """Normalized mass of the radial weight on [a, b]: Q(s, a²) − Q(s, b²)."""
    _check_window(a, b)
    upper = 0.0 if math.isinf(b) else regularized_upper_gamma(w.shape, b * b)
    return regularized_upper_gamma(w.shape, a * a) - upper


def radial_tail_mass(w: RadialWeight, a: float, b: float = math.inf) -> float:
    """Normalized mass outside [a, b], from P and Q so small tails keep full precision."""
    _check_window(a, b)
    upper = 0.0 if math.isinf(b) else regularized_upper_gamma(w.shape, b * b)
    return regularized_lower_gamma(w.shape, a * a) + upper


def kernel_log_prefactor(N: int) -> float:
    """ln(2/Γ(N²/2)), checked against the sphere/Gaussian Vandermonde ratio."""
    from_mass = math.log(2.0) - log_gamma(N * N / 2.0)
    sphere = selberg_service.sphere_vandermonde_integral(N)
    gaussian = selberg_service.gaussian_selberg(N, 1.0, 1.0)
    from_ball = (sphere / gaussian).log
    if abs(from_mass - from_ball) > PREFACTOR_LOG_TOLERANCE:
        raise InconsistencyError(
            f"kernel prefactor disagrees for N={N}: {from_mass!r} vs {from_ball!r}"
        )
    return from_mass


def _partial_kernel_integral(exponent: float, a, b):
    """∫_a^b e^{−r²} r^p dr in units of Γ((p+1)/2)/2."""
    shape = (exponent + 1) / 2.0
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return regularized_upper_gamma(shape, a * a) - regularized_upper_gamma(shape, b * b)


def _forward_values(N: int, sigma_v: DensityGrid, x: np.ndarray, exponent: float, nodes: int) -> np.ndarray:
    """The linear part of the operator, without mass bookkeeping."""
    weight = RadialWeight(N=N)
    log_prefactor = kernel_log_prefactor(N)
    ax = np.abs(x)

    r_lo = np.maximum(ax, max(weight.r_star - RADIAL_HALF_WIDTH, 0.0))
    r_hi = np.maximum(weight.r_star + RADIAL_HALF_WIDTH, r_lo)
    r, dr = gauss_legendre_mesh(r_lo, r_hi, nodes)
    log_kernel = log_prefactor - r**2 + exponent * np.log(r)
    body = np.sum(dr * np.exp(log_kernel) * sigma_v.interpolate(x[:, None] / r), axis=-1)

    # outside the window σ_v(x/r) is frozen at its window-edge value
    scale = math.exp(log_prefactor + log_gamma((exponent + 1) / 2.0) - math.log(2.0))
    edge_lo = np.where(r_lo > 0, r_lo, 1.0)
    below = np.where(
        r_lo > ax,
        _partial_kernel_integral(exponent, ax, r_lo) * sigma_v.interpolate(x / edge_lo),
        0.0,
    )
    above = _partial_kernel_integral(exponent, r_hi, np.inf) * sigma_v.interpolate(x / r_hi)
    return body + scale * (below + above)


def apply_forward_operator(
    N: int,
    sigma_v: DensityGrid,
    points: Optional[np.ndarray] = None,
    kernel_exponent: Optional[float] = None,
    nodes: Optional[int] = None,
    check_mass: bool = True,
) -> DensityGrid:
    """Tabulate 2/Γ(N²/2) ∫_{|x|}^∞ e^{−r²} r^p σ_v(x/r) dr, p = N²−2 by default.

    The r-integral is done by Gauss-Legendre on the window
    [max(|x|, r*−8), r*+8]; beyond it the kernel mass comes from the
    incomplete gamma function. With `check_mass` the output must keep mass N
    within 1%; otherwise it declares whatever mass it has.
    """
    if N < 2:
        raise DomainError(f"the forward operator needs N >= 2, got {N}")
    if sigma_v.support is None or sigma_v.support[0] < -1.0 or sigma_v.support[1] > 1.0:
        raise DomainError("sigma_v must be supported inside [-1, 1]")
    if abs(sigma_v.integral() - N) > FORWARD_MASS_DRIFT * N:
        raise DomainError(f"sigma_v must carry mass {N}, got {sigma_v.integral():.6g}")

    settings = get_settings()
    exponent = float(N * N - 2 if kernel_exponent is None else kernel_exponent)
    if points is None:
        lo, hi = default_support(N, Ensemble.GUE)
        points = np.linspace(lo, hi, settings.GRID_POINTS)
    x = np.asarray(points, dtype=float)
    values = np.clip(_forward_values(N, sigma_v, x, exponent, nodes or settings.QUADRATURE_NODES), 0.0, None)

    integral = trapezoid(values, x)
    drift = abs(integral - N) / N
    if check_mass and drift > FORWARD_MASS_DRIFT:
        logger.error(f"Forward operator mass drift {drift:.3%} for N={N}")
        raise NumericalFailureError(f"forward operator output has mass {integral:.6g}, expected {N}")
    return DensityGrid(
        points=x,
        values=values,
        mass=float(N) if check_mass else integral,
        N=N,
        kind="forward",
        tolerance=FORWARD_MASS_DRIFT,
    )


class IntegralEquationCheck(NamedTuple):
    report: IntegralEquationReport
    forward: DensityGrid
    exact: DensityGrid
    sigma_v: DensityGrid


@log_execution_time
def verify_integral_equation(
    N: int,
    num_samples: int,
    bins: Optional[int] = None,
    master_seed: int = 0,
    num_streams: int = 1,
    kernel_exponent: Optional[float] = None,
    method: str = "dense",
) -> IntegralEquationCheck:
    """Sample σ_v, push it through the forward operator and compare with σ_GUE."""
    if not 2 <= N <= MAX_VERIFY_SIZE:
        raise DomainError(f"N must lie in [2, {MAX_VERIFY_SIZE}], got {N}")
    settings = get_settings()
    bins = bins or settings.DEFAULT_BINS
    plan = SamplingPlan(
        master_seed=master_seed,
        N=N,
        num_samples=num_samples,
        num_streams=num_streams,
        chunk_size=settings.CHUNK_SIZE,
        ensemble=Ensemble.FIXED_TRACE,
        method=method,
    )
    sigma_v = MonteCarloService(plan).density(bins)

    exact = gue_grid(N)
    forward_exponent = float(N * N - 2 if kernel_exponent is None else kernel_exponent)
    forward = apply_forward_operator(
        N, sigma_v, points=exact.points, kernel_exponent=forward_exponent, check_mass=kernel_exponent is None
    )
    # the operator is linear and mass-preserving, so pushing the per-bin
    # standard errors through it bounds the Monte Carlo part of the L1 error
    budget_values = _forward_values(
        N,
        sigma_v.with_values(sigma_v.errors, check=False),
        exact.points,
        forward_exponent,
        settings.QUADRATURE_NODES,
    )

    difference = np.abs(forward.values - exact.values)
    l1 = trapezoid(difference, exact.points)
    budget = trapezoid(budget_values, exact.points)
    report = IntegralEquationReport(
        N=N,
        samples=num_samples,
        bins=bins,
        l1_distance=l1,
        relative_l1=l1 / N,
        sup_distance=float(difference.max()),
        mc_error_budget=budget,
        mass_drift=abs(forward.integral() - N) / N,
        kernel_exponent=forward_exponent,
        passed=l1 <= 3.0 * budget,
    )
    log = logger.info if report.passed else logger.warning
    log(f"Integral equation N={N}: L1={l1:.4g} budget={budget:.4g} pass={report.passed}")
    return IntegralEquationCheck(report=report, forward=forward, exact=exact, sigma_v=sigma_v)


def sigma_v_zero(N: int, mode: str = "exact_relation") -> float:
    """σ_v,N(0) from the x=0 relation, or its large-N asymptotic form."""
    if mode not in SIGMA_ZERO_MODES:
        raise DomainError(f"mode must be one of {SIGMA_ZERO_MODES}, got {mode!r}")
    if N < 1:
        raise DomainError(f"N must be positive, got {N}")
    if N == 1:
        # Γ((N²−1)/2) = Γ(0) diverges: the N=1 sphere is the two points ±1
        logger.warning("sigma_v(0) is degenerate for N=1; returning 0")
        return 0.0
    ratio = gamma_ratio(N * N / 2.0, (N * N - 1) / 2.0)
    if mode == "exact_relation":
        return gue_level_density(N, 0.0) * ratio
    return math.sqrt(2.0 * N) / math.pi * ratio


def sigma_v_zero_report(N: int, sigma_v: Optional[DensityGrid] = None) -> SigmaZeroReport:
    """Both closed forms of σ_v,N(0) and, given a sampled σ_v, its value at 0."""
    monte_carlo = stderr = None
    if sigma_v is not None:
        if sigma_v.N not in (None, N):
            raise DomainError(f"sigma_v was sampled for N={sigma_v.N}, not {N}")
        monte_carlo = float(sigma_v.interpolate(0.0))
        stderr = float(sigma_v.interpolate_errors(0.0))
    return SigmaZeroReport(
        N=N,
        exact_relation=sigma_v_zero(N, "exact_relation"),
        asymptotic=sigma_v_zero(N, "paper_asymptotic"),
        monte_carlo=monte_carlo,
        monte_carlo_stderr=stderr,
    )


def _check_bulk(points: np.ndarray, N: int) -> None:
    if np.count_nonzero(np.abs(points) <= BULK_WINDOW) < 2:
        raise DomainError(
            f"fewer than 2 histogram points fall in |x| <= {BULK_WINDOW} for N={N}; use more bins"
        )


def _bulk_distances(rho: DensityGrid):
    bulk = np.abs(rho.points) <= BULK_WINDOW
    points = rho.points[bulk]
    difference = np.abs(rho.values[bulk] - semicircle(points))
    return trapezoid(difference, points), float(difference.max()), points, bulk


class SemicircleRun(NamedTuple):
    report: SemicircleReport
    overlays: List[DensityGrid]


@log_execution_time
def semicircle_convergence_report(
    N_list: Sequence[int],
    num_samples: int,
    bins: Optional[int] = None,
    master_seed: int = 0,
    num_streams: int = 1,
    method: str = "dense",
) -> SemicircleRun:
    """Distance of the rescaled fixed-trace density ρ_v,N to the semicircle, per N."""
    settings = get_settings()
    bins = bins or settings.DEFAULT_BINS
    rows, overlays = [], []
    for N in sorted(N_list):
        if N < 2:
            raise DomainError(f"every N must be at least 2, got {N}")
        plan = SamplingPlan(
            master_seed=master_seed,
            N=N,
            num_samples=num_samples,
            num_streams=num_streams,
            chunk_size=settings.CHUNK_SIZE,
            ensemble=Ensemble.FIXED_TRACE,
            method=method,
        )
        sigma_v = MonteCarloService(plan).density(bins)
        window = scale_fixed_trace_to_rho(N, sigma_v).restrict(-RHO_WINDOW, RHO_WINDOW)
        _check_bulk(window.points, N)
        mass = window.mass
        if not 0.95 <= mass <= 1.05:
            logger.warning(f"rho_v mass on |x|<={RHO_WINDOW} is {mass:.4f} for N={N}")
        rho = window.with_values(window.values / mass, mass=1.0, errors=window.errors / mass)
        l1, sup, points, bulk = _bulk_distances(rho)
        error_bar = trapezoid(rho.errors[bulk], points)

        gue_rho = scale_gue_to_rho(N, gue_grid(N))
        gue_values = gue_rho.interpolate(rho.points)
        gue_l1 = trapezoid(np.abs(gue_values[bulk] - semicircle(points)), points)

        rows.append(
            SemicircleRow(
                N=N,
                samples=num_samples,
                l1_distance=l1,
                sup_distance=sup,
                error_bar=error_bar,
                mass_before_renormalization=mass,
                gue_l1_distance=gue_l1,
            )
        )
        overlays.append(rho)
        logger.info(f"Semicircle N={N}: L1={l1:.4g} ± {error_bar:.2g}")

    monotone = all(
        later.l1_distance <= earlier.l1_distance + later.error_bar
        for earlier, later in zip(rows, rows[1:])
    )
    report = SemicircleReport(rows=rows, monotone=monotone, passed=monotone)
    return SemicircleRun(report=report, overlays=overlays)
