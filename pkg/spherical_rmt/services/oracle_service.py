"""Independent numerical oracles for the Selberg-type closed forms.

Quadrature oracles are used for n ≤ 3, Monte Carlo oracles above that.
"""

import itertools
import math
from typing import List, Optional, Tuple

import numpy as np
from scipy import integrate, special

from ..core.config import get_settings
from ..core.logger import logger
from ..schemas.selberg import LogValue, OracleRow, SelbergParams
from ..utils.exceptions import DomainError
from ..utils.quadrature import gauss_legendre_mesh
from . import selberg_service

MAX_QUADRATURE_DIM = 3
MC_BLOCK = 100_000


def _abs_vandermonde_power(x: np.ndarray, power: float) -> np.ndarray:
    """Π_{i<j}|x_j − x_i|^power along the last axis."""
    n = x.shape[-1]
    out = np.ones(x.shape[:-1])
    if power == 0:
        return out
    for i, j in itertools.combinations(range(n), 2):
        out = out * np.abs(x[..., j] - x[..., i]) ** power
    return out


def _moment_factor(x: np.ndarray, m: int) -> np.ndarray:
    """e_m(x)/C(n,m): symmetrized x_1⋯x_m."""
    n = x.shape[-1]
    if m == 0:
        return np.ones(x.shape[:-1])
    total = np.zeros(x.shape[:-1])
    for combo in itertools.combinations(range(n), m):
        total = total + np.prod(x[..., list(combo)], axis=-1)
    return total / math.comb(n, m)


def _tensor(nodes: np.ndarray, weights: np.ndarray, n: int) -> Tuple[np.ndarray, np.ndarray]:
    grids = np.meshgrid(*([nodes] * n), indexing="ij")
    wgrids = np.meshgrid(*([weights] * n), indexing="ij")
    x = np.stack([g.ravel() for g in grids], axis=-1)
    w = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=-1)
    return x, w


def _check_dim(n: int) -> None:
    if n > MAX_QUADRATURE_DIM:
        raise DomainError(f"tensor quadrature oracles are limited to n <= {MAX_QUADRATURE_DIM}")


def selberg_quadrature(p: SelbergParams, m: int = 0, nodes: Optional[int] = None) -> float:
    """∫_{[0,1]^n} x_1⋯x_m Φ(x) dx by tensor quadrature.

    Integer γ: Gauss–Jacobi rule carrying x^{α−1}(1−x)^{β−1}; exact because
    Δ^{2γ} is a polynomial. Otherwise the ordered simplex x_1<…<x_n is mapped
    to the unit cube and integrated with Gauss–Legendre; exact when 2γ, α and
    β are integers, approximate otherwise.
    """
    _check_dim(p.n)
    nodes = nodes or get_settings().ORACLE_NODES
    n, a, b, g = p.n, p.alpha, p.beta, p.gamma

    if float(g).is_integer():
        t, w = special.roots_jacobi(nodes, b - 1.0, a - 1.0)
        x1 = (1.0 + t) / 2.0
        w1 = w * 2.0 ** (-(a + b - 1.0))
        x, weights = _tensor(x1, w1, n)
        integrand = _abs_vandermonde_power(x, 2 * g) * _moment_factor(x, m)
        return float(np.sum(weights * integrand))

    if not (float(2 * g).is_integer() and float(a).is_integer() and float(b).is_integer()):
        logger.warning(f"selberg_quadrature is approximate for {p}")

    t1, w1 = gauss_legendre_mesh(0.0, 1.0, nodes)
    t, weights = _tensor(t1, w1, n)
    # x_n = t_n, x_k = t_k x_{k+1}
    x = np.empty_like(t)
    x[:, n - 1] = t[:, n - 1]
    for k in range(n - 2, -1, -1):
        x[:, k] = t[:, k] * x[:, k + 1]
    jacobian = np.prod(x[:, 1:], axis=-1) if n > 1 else np.ones(len(x))
    integrand = (
        _abs_vandermonde_power(x, 2 * g)
        * np.prod(x ** (a - 1) * (1 - x) ** (b - 1), axis=-1)
        * _moment_factor(x, m)
    )
    return float(math.factorial(n) * np.sum(weights * jacobian * integrand))


def _mean_and_stderr(draw, num_points: int) -> Tuple[float, float]:
    total, total_sq, count = 0.0, 0.0, 0
    while count < num_points:
        size = min(MC_BLOCK, num_points - count)
        values = draw(size)
        total += float(np.sum(values))
        total_sq += float(np.sum(values**2))
        count += size
    mean = total / count
    variance = max(total_sq / count - mean**2, 0.0)
    return mean, math.sqrt(variance / count)


def selberg_monte_carlo(p: SelbergParams, m: int = 0, num_points: int = 200_000, seed: int = 0):
    """Importance sampling with x_j ~ Beta(α, β) i.i.d. Returns (value, stderr)."""
    rng = np.random.default_rng(seed)

    def draw(size):
        x = rng.beta(p.alpha, p.beta, size=(size, p.n))
        return _abs_vandermonde_power(x, 2 * p.gamma) * _moment_factor(x, m)

    mean, stderr = _mean_and_stderr(draw, num_points)
    scale = math.exp(p.n * special.betaln(p.alpha, p.beta))
    return scale * mean, scale * stderr


def gaussian_quadrature(n: int, gamma: float, a: float, nodes: Optional[int] = None) -> float:
    """Tensor Gauss–Hermite rule; exact for integer γ."""
    _check_dim(n)
    nodes = nodes or get_settings().ORACLE_NODES
    y, w = special.roots_hermite(nodes)
    x, weights = _tensor(y / math.sqrt(a), w, n)
    return float(a ** (-n / 2.0) * np.sum(weights * _abs_vandermonde_power(x, 2 * gamma)))


def gaussian_monte_carlo(n: int, gamma: float, a: float, num_points: int = 200_000, seed: int = 0):
    """x_j ~ N(0, 1/(2a)) i.i.d. Returns (value, stderr)."""
    rng = np.random.default_rng(seed)
    sd = math.sqrt(1.0 / (2.0 * a))

    def draw(size):
        return _abs_vandermonde_power(rng.normal(0.0, sd, size=(size, n)), 2 * gamma)

    mean, stderr = _mean_and_stderr(draw, num_points)
    scale = (math.pi / a) ** (n / 2.0)
    return scale * mean, scale * stderr


def ball_monte_carlo(n: int, R: float, num_points: int = 1_000_000, seed: int = 0):
    """Uniform points in the n-ball of radius R. Returns (value, stderr) of ∫Δ²."""
    rng = np.random.default_rng(seed)

    def draw(size):
        g = rng.standard_normal((size, n))
        radius = R * rng.random(size) ** (1.0 / n)
        x = g / np.linalg.norm(g, axis=1, keepdims=True) * radius[:, None]
        return _abs_vandermonde_power(x, 2.0)

    mean, stderr = _mean_and_stderr(draw, num_points)
    volume = math.pi ** (n / 2.0) * R**n / math.gamma(n / 2.0 + 1)
    return volume * mean, volume * stderr


def disk_polar_quadrature(gamma: float, exponent: float) -> float:
    """∫_{x²+y²≤1} |x−y|^{2γ}(1−x²−y²)^exponent in polar coordinates."""
    angular, _ = integrate.quad(
        lambda th: abs(math.cos(th) - math.sin(th)) ** (2 * gamma),
        0.0,
        2 * math.pi,
        points=[math.pi / 4, 5 * math.pi / 4],
        limit=200,
        epsabs=1e-13,
        epsrel=1e-12,
    )
    # (1−r²)^e = (1−r)^e (1+r)^e; the first factor goes into the quadrature weight
    radial, _ = integrate.quad(
        lambda r: r ** (1 + 2 * gamma) * (1 + r) ** exponent,
        0.0,
        1.0,
        weight="alg",
        wvar=(0.0, exponent),
        limit=200,
        epsabs=1e-14,
        epsrel=1e-12,
    )
    return angular * radial


def gamma_mixing_quadrature(n: int, gamma: float, beta: float) -> float:
    """Γ(β)^{-1}∫_0^∞ a^{β−1}e^{−a} G(a) da, G the Gaussian Selberg integral."""
    log_norm = special.gammaln(beta)

    def integrand(a):
        log_g = selberg_service.gaussian_selberg(n, gamma, a).log
        return math.exp((beta - 1) * math.log(a) - a + log_g - log_norm)

    value, _ = integrate.quad(integrand, 0.0, np.inf, limit=400, epsrel=1e-11)
    return value


# --- suite ---

QUADRATURE_TOLERANCE = 1e-6
MC_SIGMAS = 3.0

SELBERG_QUADRATURE_SETS = [
    (1, 0.5, 0.5, 0.0),
    (1, 2.5, 1.5, 1.0),
    (2, 1.0, 1.0, 1.0),
    (2, 0.7, 1.3, 1.0),
    (2, 2.0, 3.0, 2.0),
    (2, 3.5, 0.9, 1.0),
    (3, 1.0, 1.0, 1.0),
    (3, 1.5, 2.5, 1.0),
    (3, 0.8, 0.6, 0.0),
    (3, 2.0, 2.0, 2.0),
    (1, 2.0, 3.0, 0.5),
    (2, 1.0, 1.0, 0.5),
    (2, 2.0, 1.0, 0.5),
    (2, 1.0, 2.0, 1.5),
    (2, 3.0, 2.0, 0.5),
    (2, 1.0, 1.0, 2.5),
    (3, 2.0, 1.0, 0.5),
    (3, 1.0, 1.0, 0.5),
    (3, 1.0, 2.0, 1.5),
    (3, 2.0, 2.0, 0.5),
]
AOMOTO_SETS = [
    ((2, 1.0, 1.0, 1.0), 1),
    ((2, 1.0, 1.0, 1.0), 2),
    ((3, 2.0, 1.0, 0.5), 2),
    ((3, 1.5, 2.5, 1.0), 3),
]
SELBERG_MONTE_CARLO_SETS = [
    (4, 1.0, 1.0, 1.0),
    (5, 2.0, 2.0, 0.5),
    (6, 1.5, 1.5, 0.5),
]
GAUSSIAN_QUADRATURE_SETS = [(1, 0.5, 2.0), (2, 1.0, 1.0), (3, 1.0, 1.0), (3, 2.0, 0.5)]
GAUSSIAN_MONTE_CARLO_SETS = [(3, 1.0, 1.0), (4, 1.0, 1.0)]


def _quadrature_row(identity, params, closed, oracle, method) -> OracleRow:
    relative_error = abs(closed.value - oracle) / abs(oracle)
    return OracleRow(
        identity=identity,
        params=params,
        closed_form_log=closed.log,
        closed_form=closed.value,
        oracle=oracle,
        method=method,
        relative_error=relative_error,
        tolerance=QUADRATURE_TOLERANCE,
        passed=relative_error <= QUADRATURE_TOLERANCE,
    )


def _monte_carlo_row(identity, params, closed, oracle, stderr, method) -> OracleRow:
    relative_error = abs(closed.value - oracle) / abs(oracle)
    tolerance = MC_SIGMAS * stderr / abs(oracle)
    return OracleRow(
        identity=identity,
        params=params,
        closed_form_log=closed.log,
        closed_form=closed.value,
        oracle=oracle,
        oracle_stderr=stderr,
        method=method,
        relative_error=relative_error,
        tolerance=tolerance,
        passed=relative_error <= tolerance,
    )


def run_selberg_suite(mc_points: int = 200_000, seed: int = 0) -> List[OracleRow]:
    rows: List[OracleRow] = []
    for n, a, b, g in SELBERG_QUADRATURE_SETS:
        p = SelbergParams(n=n, alpha=a, beta=b, gamma=g)
        rows.append(
            _quadrature_row(
                "selberg_integral", p.model_dump(), selberg_service.selberg_integral(p),
                selberg_quadrature(p), "tensor quadrature",
            )
        )

    for (n, a, b, g), m in AOMOTO_SETS:
        p = SelbergParams(n=n, alpha=a, beta=b, gamma=g)
        closed = selberg_service.selberg_integral(p)
        moment = closed.value * selberg_service.aomoto_moment(p, m)
        closed_moment = LogValue(math.log(moment))
        rows.append(
            _quadrature_row(
                "aomoto_moment", {**p.model_dump(), "m": m}, closed_moment,
                selberg_quadrature(p, m=m), "tensor quadrature",
            )
        )

    for n, g, a in GAUSSIAN_QUADRATURE_SETS:
        rows.append(
            _quadrature_row(
                "gaussian_selberg", {"n": n, "gamma": g, "a": a},
                selberg_service.gaussian_selberg(n, g, a),
                gaussian_quadrature(n, g, a), "Gauss-Hermite quadrature",
            )
        )

    rows.append(
        _quadrature_row(
            "ball_vandermonde_integral", {"n": 2, "R": 1.0},
            selberg_service.ball_vandermonde_integral(2, 1.0),
            disk_polar_quadrature(1.0, 0.0), "polar quadrature",
        )
    )
    for n, g, beta in [(2, 1.0, 5.0), (2, 0.5, 2.0)]:
        exponent = beta - selberg_service.homogeneity_degree(n, g) - 1
        rows.append(
            _quadrature_row(
                "generalized_ball_integral", {"n": n, "gamma": g, "beta": beta},
                selberg_service.generalized_ball_integral(n, g, beta),
                disk_polar_quadrature(g, exponent), "polar quadrature",
            )
        )
    rows.append(
        _quadrature_row(
            "generalized_ball_integral", {"n": 1, "gamma": 0.7, "beta": 2.5},
            selberg_service.generalized_ball_integral(1, 0.7, 2.5),
            math.exp(special.betaln(0.5, 2.0)), "beta function",
        )
    )
    for n, g, beta in [(2, 1.0, 4.0), (3, 0.5, 5.0)]:
        rows.append(
            _quadrature_row(
                "rational_selberg_integral", {"n": n, "gamma": g, "beta": beta},
                selberg_service.rational_selberg_integral(n, g, beta),
                gamma_mixing_quadrature(n, g, beta), "gamma mixing quadrature",
            )
        )

    for index, (n, a, b, g) in enumerate(SELBERG_MONTE_CARLO_SETS):
        p = SelbergParams(n=n, alpha=a, beta=b, gamma=g)
        value, stderr = selberg_monte_carlo(p, num_points=mc_points, seed=seed + index)
        rows.append(
            _monte_carlo_row(
                "selberg_integral", p.model_dump(), selberg_service.selberg_integral(p),
                value, stderr, "Monte Carlo (Beta importance sampling)",
            )
        )
    for index, (n, g, a) in enumerate(GAUSSIAN_MONTE_CARLO_SETS):
        value, stderr = gaussian_monte_carlo(n, g, a, num_points=mc_points, seed=seed + 100 + index)
        rows.append(
            _monte_carlo_row(
                "gaussian_selberg", {"n": n, "gamma": g, "a": a},
                selberg_service.gaussian_selberg(n, g, a), value, stderr, "Monte Carlo",
            )
        )
    value, stderr = ball_monte_carlo(3, 1.0, num_points=5 * mc_points, seed=seed + 200)
    rows.append(
        _monte_carlo_row(
            "ball_vandermonde_integral", {"n": 3, "R": 1.0},
            selberg_service.ball_vandermonde_integral(3, 1.0), value, stderr,
            "Monte Carlo (uniform ball)",
        )
    )

    failed = [row for row in rows if not row.passed]
    if failed:
        logger.error(f"{len(failed)} of {len(rows)} Selberg identities failed")
    else:
        logger.info(f"All {len(rows)} Selberg identities verified")
    return rows
