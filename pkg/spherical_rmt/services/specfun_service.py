"""Log-space gamma functions and orthonormal Hermite (oscillator) functions.

All functions are pure and vectorize over numpy arrays.
"""

import math
from typing import Iterator

import numpy as np
from scipy import special

from ..utils.decorators import log_exceptions
from ..utils.exceptions import DomainError

PI_QUARTER = math.pi ** -0.25
RESCALE_LIMIT = 1e100


def _positive(name: str, value) -> np.ndarray:
    array = np.asarray(value, dtype=float)
    if np.any(~(array > 0)):
        raise DomainError(f"{name} must be positive, got {value}")
    return array


def _scalar_or_array(array: np.ndarray):
    return float(array) if array.ndim == 0 else array


@log_exceptions
def log_gamma(x):
    """ln Γ(x) for x > 0."""
    return _scalar_or_array(special.gammaln(_positive("x", x)))


@log_exceptions
def gamma_ratio(a, b):
    """Γ(a)/Γ(b) as exp(ln Γ(a) − ln Γ(b))."""
    a = _positive("a", a)
    b = _positive("b", b)
    return _scalar_or_array(np.exp(special.gammaln(a) - special.gammaln(b)))


def _check_incomplete_args(s, x):
    s = _positive("s", s)
    x = np.asarray(x, dtype=float)
    if np.any(~(x >= 0)):
        raise DomainError(f"x must be nonnegative, got {x}")
    return s, x


@log_exceptions
def regularized_upper_gamma(s, x):
    """Q(s, x) = Γ(s, x)/Γ(s)."""
    s, x = _check_incomplete_args(s, x)
    return _scalar_or_array(special.gammaincc(s, x))


@log_exceptions
def regularized_lower_gamma(s, x):
    """P(s, x) = 1 − Q(s, x), evaluated without cancellation."""
    s, x = _check_incomplete_args(s, x)
    return _scalar_or_array(special.gammainc(s, x))


def _finite_abscissae(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("hermite functions need finite abscissae")
    return x


def _oscillator_functions(count: int, x: np.ndarray) -> Iterator[np.ndarray]:
    """Yield φ_0 … φ_{count−1} at x.

    Normalized recurrence
        φ_{k+1} = x·√(2/(k+1))·φ_k − √(k/(k+1))·φ_{k−1},
    never forms H_k or k!. The Gaussian factor is carried as a separate log
    scale, so φ_k stays representable where e^{−x²/2} alone underflows.
    """
    log_scale = -0.5 * x**2
    prev = np.zeros_like(x)
    curr = np.full_like(x, PI_QUARTER)
    for k in range(count):
        with np.errstate(divide="ignore"):
            yield np.sign(curr) * np.exp(np.log(np.abs(curr)) + log_scale)
        prev, curr = curr, x * math.sqrt(2.0 / (k + 1)) * curr - math.sqrt(k / (k + 1)) * prev
        factor = np.abs(curr)
        big = factor > RESCALE_LIMIT
        if np.any(big):
            factor = np.where(big, factor, 1.0)
            prev, curr = prev / factor, curr / factor
            log_scale = log_scale + np.log(factor)


@log_exceptions
def hermite_functions(k_max: int, x) -> np.ndarray:
    """φ_0 … φ_{k_max} at x, shape (k_max + 1, *x.shape)."""
    if k_max < 0:
        raise DomainError("order must be nonnegative")
    x = _finite_abscissae(x)
    return np.stack(list(_oscillator_functions(k_max + 1, x)))


@log_exceptions
def hermite_phi(k: int, x):
    """The k-th orthonormal oscillator function φ_k(x) = H_k(x)e^{−x²/2}/(2^k k! √π)^{1/2}."""
    if k < 0:
        raise DomainError("order must be nonnegative")
    x = _finite_abscissae(x)
    for phi in _oscillator_functions(k + 1, x):
        pass
    return _scalar_or_array(phi)


@log_exceptions
def sum_of_squares(n_terms: int, x) -> np.ndarray:
    """Σ_{k<n_terms} φ_k(x)², accumulated along the recurrence."""
    x = _finite_abscissae(x)
    total = np.zeros_like(x)
    for phi in _oscillator_functions(n_terms, x):
        total += phi**2
    return total
