"""Closed forms of the Selberg-type integrals, evaluated in log space.

Notation: D(n, γ) = n(γ(n−1)+1)/2 is the homogeneity degree of |Δ|^{2γ}dx.
"""

import math

import numpy as np
from scipy.special import gammaln

from ..schemas.selberg import LogValue, SelbergParams
from ..utils.decorators import log_exceptions
from ..utils.exceptions import DomainError

LOG_2PI = math.log(2.0 * math.pi)


def homogeneity_degree(n: int, gamma: float) -> float:
    return n * (gamma * (n - 1) + 1) / 2.0


def _check_size(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")


def _check_gamma(gamma: float) -> None:
    if gamma < 0:
        raise DomainError(f"gamma must be nonnegative, got {gamma}")


def _log_vandermonde_product(n: int, gamma: float) -> float:
    """ln Π_{j=1}^n Γ(1+jγ)/Γ(1+γ)."""
    j = np.arange(1, n + 1)
    return float(np.sum(gammaln(1 + j * gamma)) - n * gammaln(1 + gamma))


@log_exceptions
def selberg_integral(p: SelbergParams) -> LogValue:
    """I(α,β,γ,n) = ∫_{[0,1]^n} |Δ|^{2γ} Π x^{α−1}(1−x)^{β−1} dx."""
    n, a, b, g = p.n, p.alpha, p.beta, p.gamma
    j = np.arange(n)
    log_value = np.sum(
        gammaln(a + j * g)
        + gammaln(b + j * g)
        + gammaln(1 + (j + 1) * g)
        - gammaln(a + b + (n + j - 1) * g)
        - gammaln(1 + g)
    )
    return LogValue(float(log_value))


@log_exceptions
def aomoto_moment(p: SelbergParams, m: int) -> float:
    """⟨x_1⋯x_m⟩ under the Selberg weight, relative to selberg_integral."""
    if not 1 <= m <= p.n:
        raise DomainError(f"m must lie in [1, {p.n}], got {m}")
    n, a, b, g = p.n, p.alpha, p.beta, p.gamma
    j = np.arange(1, m + 1)
    return float(np.prod((a + (n - j) * g) / (a + b + (2 * n - j - 1) * g)))


@log_exceptions
def gaussian_selberg(n: int, gamma: float, a: float) -> LogValue:
    """∫_{R^n} |Δ|^{2γ} Π e^{−a x_j²} dx = (2π)^{n/2}(2a)^{−D} Π Γ(1+jγ)/Γ(1+γ)."""
    _check_size(n)
    _check_gamma(gamma)
    if not a > 0:
        raise DomainError(f"a must be positive, got {a}")
    degree = homogeneity_degree(n, gamma)
    return LogValue(
        n / 2.0 * LOG_2PI - degree * math.log(2.0 * a) + _log_vandermonde_product(n, gamma)
    )


@log_exceptions
def rational_selberg_integral(n: int, gamma: float, beta: float) -> LogValue:
    """∫_{R^n} |Δ|^{2γ}(1+Σx²)^{−β} dx, the Gaussian integral mixed over a ~ a^{β−1}e^{−a}."""
    degree = homogeneity_degree(n, gamma)
    if not beta > degree:
        raise DomainError(f"beta must exceed {degree} for convergence, got {beta}")
    mixing = LogValue(float(gammaln(beta - degree) - gammaln(beta)))
    return mixing * gaussian_selberg(n, gamma, 1.0)


@log_exceptions
def generalized_ball_integral(n: int, gamma: float, beta: float) -> LogValue:
    """∫_{Σy²≤1} |Δ|^{2γ}(1−Σy²)^{β−D−1} dy."""
    _check_size(n)
    _check_gamma(gamma)
    degree = homogeneity_degree(n, gamma)
    if not beta - degree - 1 > -1:
        raise DomainError(
            f"exponent beta - D - 1 = {beta - degree - 1} must exceed -1 for integrability"
        )
    return LogValue(
        float(gammaln(beta - degree) - gammaln(beta))
        + n / 2.0 * LOG_2PI
        - degree * math.log(2.0)
        + _log_vandermonde_product(n, gamma)
    )


@log_exceptions
def ball_vandermonde_integral(n: int, R: float) -> LogValue:
    """∫_{Σx²≤R²} Δ² dx = R^{n²}(2π)^{n/2}2^{−n²/2}Π_{j≤n}Γ(1+j)/Γ(n²/2+1)."""
    _check_size(n)
    if not R > 0:
        raise DomainError(f"R must be positive, got {R}")
    j = np.arange(1, n + 1)
    return LogValue(
        n * n * math.log(R)
        - float(gammaln(n * n / 2.0 + 1))
        + n / 2.0 * LOG_2PI
        - n * n / 2.0 * math.log(2.0)
        + float(np.sum(gammaln(1 + j)))
    )


@log_exceptions
def sphere_vandermonde_integral(n: int) -> LogValue:
    """∫_{S^{n−1}} Δ² dΩ = d/dR of the ball integral at R=1, i.e. n² times it."""
    return LogValue(2 * math.log(n)) * ball_vandermonde_integral(n, 1.0)
