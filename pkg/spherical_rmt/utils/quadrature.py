"""Gauss rules mapped to finite intervals."""

from functools import lru_cache
from typing import Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

# numpy 2 renamed trapz
_trapezoid = getattr(np, "trapezoid", None) or np.trapz


@lru_cache(maxsize=32)
def _reference_rule(n: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = leggauss(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre_mesh(xmin, xmax, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Creates an n-point Gauss-Legendre mesh on [xmin, xmax].

    `xmin` and `xmax` may be arrays of equal shape; the mesh then gets a
    trailing axis of length n, one rule per interval.

    Returns
    -------
    x_array : ndarray
        Integration points, shape (..., n).
    x_weights : ndarray
        Integration weights, same shape.
    """
    y_array, y_weights = _reference_rule(n)  # interval [-1, 1]
    xmin = np.asarray(xmin, dtype=float)[..., None]
    xmax = np.asarray(xmax, dtype=float)[..., None]

    x_array = 0.5 * (y_array + 1) * (xmax - xmin) + xmin
    x_weights = (xmax - xmin) / 2 * y_weights
    return x_array, x_weights


def trapezoid(values, points) -> float:
    return float(_trapezoid(values, points))
