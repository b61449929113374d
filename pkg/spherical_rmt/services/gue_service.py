"""Exact finite-N GUE level density, the semicircle law and the scaling maps.

The GUE weight is e^{−Σx²}Δ²(x); with this convention the level density is
the Hermite-function sum σ_GUE,N(x) = Σ_{k<N} φ_k(x)².
"""

import math
from typing import Optional, Tuple

import numpy as np

from ..core.config import get_settings
from ..core.constants import GUE_SUPPORT_FACTOR, GUE_SUPPORT_MARGIN
from ..schemas.density import DensityGrid
from ..schemas.spectrum import Ensemble
from ..utils.decorators import log_exceptions
from ..utils.exceptions import DomainError, InconsistencyError
from .specfun_service import sum_of_squares

MAX_GUE_SIZE = 500


@log_exceptions
def gue_level_density(N: int, x):
    if not 1 <= N <= MAX_GUE_SIZE:
        raise DomainError(f"N must lie in [1, {MAX_GUE_SIZE}], got {N}")
    values = sum_of_squares(N, x)
    return float(values) if values.ndim == 0 else values


def semicircle(x, normalized: bool = True):
    """√(1−x²) on |x| ≤ 1, zero elsewhere; times 2/π when normalized (mass 1)."""
    x = np.asarray(x, dtype=float)
    values = np.sqrt(np.clip(1.0 - x**2, 0.0, None))
    if normalized:
        values = values * (2.0 / math.pi)
    return float(values) if values.ndim == 0 else values


@log_exceptions
def default_support(N: int, ensemble: Ensemble) -> Tuple[float, float]:
    if Ensemble(ensemble) is Ensemble.FIXED_TRACE:
        return (-1.0, 1.0)
    half_width = GUE_SUPPORT_FACTOR * math.sqrt(2 * N) + GUE_SUPPORT_MARGIN
    return (-half_width, half_width)


@log_exceptions
def gue_grid(N: int, points: Optional[np.ndarray] = None) -> DensityGrid:
    """σ_GUE,N tabulated on `points` (default: GRID_POINTS over the GUE support)."""
    if points is None:
        lo, hi = default_support(N, Ensemble.GUE)
        points = np.linspace(lo, hi, get_settings().GRID_POINTS)
    return DensityGrid(
        points=points,
        values=gue_level_density(N, points),
        mass=float(N),
        N=N,
        kind="gue",
    )


def _rescaled(grid: DensityGrid, x_scale: float, y_scale: float, mass: float, kind: str) -> DensityGrid:
    """Grid of y_scale·f(x/x_scale)."""
    support = None
    if grid.support is not None:
        support = (grid.support[0] * x_scale, grid.support[1] * x_scale)
    try:
        return DensityGrid(
            points=grid.points * x_scale,
            values=grid.values * y_scale,
            errors=None if grid.errors is None else grid.errors * y_scale,
            mass=mass,
            N=grid.N,
            kind=kind,
            support=support,
            tolerance=grid.tolerance,
            clipped_fraction=grid.clipped_fraction,
        )
    except InconsistencyError as e:
        raise InconsistencyError(f"{kind} scaling did not yield mass {mass}: {e}") from e


@log_exceptions
def scale_gue_to_rho(N: int, grid: DensityGrid) -> DensityGrid:
    """ρ(x) = √(2/N)·σ_GUE,N(√(2N)x).

    The Jacobian 1/√(2N) times √(2/N) is 1/N, so the mass goes from N to 1.
    """
    if abs(grid.mass - N) > grid.tolerance * N:
        raise InconsistencyError(f"expected a grid of mass {N}, got {grid.mass}")
    return _rescaled(grid, 1.0 / math.sqrt(2 * N), math.sqrt(2.0 / N), 1.0, "gue_rho")


@log_exceptions
def scale_fixed_trace_to_rho(N: int, grid: DensityGrid) -> DensityGrid:
    """ρ_v,N(x) = (2/N^{3/2})·σ_v,N(2x/√N); mass N goes to mass 1."""
    if abs(grid.mass - N) > grid.tolerance * N:
        raise InconsistencyError(f"expected a grid of mass {N}, got {grid.mass}")
    return _rescaled(grid, math.sqrt(N) / 2.0, 2.0 / N**1.5, 1.0, "fixed_trace_rho")
