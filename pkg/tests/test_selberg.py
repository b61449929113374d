import math

import pytest

from spherical_rmt.core.logger import logger
from spherical_rmt.schemas.selberg import LogValue, SelbergParams
from spherical_rmt.services import oracle_service, selberg_service
from spherical_rmt.utils.exceptions import DomainError


def test_selberg_single_variable_is_beta_function():
    p = SelbergParams(n=1, alpha=2.0, beta=3.0, gamma=0.5)
    assert selberg_service.selberg_integral(p).value == pytest.approx(1.0 / 12.0, rel=1e-14)


def test_selberg_two_variables_by_hand():
    """Test ∫∫(x−y)² over the unit square is 1/6"""
    p = SelbergParams(n=2, alpha=1.0, beta=1.0, gamma=1.0)
    assert selberg_service.selberg_integral(p).value == pytest.approx(1.0 / 6.0, rel=1e-14)


@pytest.mark.parametrize(
    "n, alpha, beta, gamma",
    [(3, 1.5, 2.0, 1.0), (2, 2.0, 3.0, 0.5), (3, 1.0, 1.0, 1.0), (2, 0.7, 1.3, 2.0)],
)
def test_selberg_against_tensor_quadrature(n, alpha, beta, gamma):
    p = SelbergParams(n=n, alpha=alpha, beta=beta, gamma=gamma)
    closed = selberg_service.selberg_integral(p).value
    assert oracle_service.selberg_quadrature(p) == pytest.approx(closed, rel=1e-6)


def test_aomoto_moment_against_quadrature():
    p = SelbergParams(n=3, alpha=2.0, beta=2.0, gamma=1.0)
    closed = selberg_service.selberg_integral(p).value * selberg_service.aomoto_moment(p, 2)
    assert oracle_service.selberg_quadrature(p, m=2) == pytest.approx(closed, rel=1e-6)


def test_aomoto_moment_range():
    p = SelbergParams(n=3, alpha=2.0, beta=2.0, gamma=1.0)
    with pytest.raises(DomainError):
        selberg_service.aomoto_moment(p, 4)


def test_selberg_against_monte_carlo():
    """Test n=4 within three standard errors"""
    p = SelbergParams(n=4, alpha=2.0, beta=2.0, gamma=0.5)
    value, stderr = oracle_service.selberg_monte_carlo(p, num_points=400_000, seed=3)
    closed = selberg_service.selberg_integral(p).value
    assert abs(value - closed) <= 3.0 * stderr


def test_selberg_params_domain():
    with pytest.raises(DomainError):
        SelbergParams(n=2, alpha=-1.0, beta=1.0, gamma=1.0)
    with pytest.raises(DomainError):
        SelbergParams(n=3, alpha=1.0, beta=1.0, gamma=-0.5)


def test_gaussian_selberg_small_cases():
    assert selberg_service.gaussian_selberg(1, 3.0, 2.0).value == pytest.approx(math.sqrt(math.pi / 2.0), rel=1e-14)
    assert selberg_service.gaussian_selberg(2, 1.0, 1.0).value == pytest.approx(math.pi, rel=1e-14)


def test_gaussian_selberg_against_hermite_quadrature():
    closed = selberg_service.gaussian_selberg(3, 1.0, 0.7).value
    assert oracle_service.gaussian_quadrature(3, 1.0, 0.7) == pytest.approx(closed, rel=1e-10)


def test_gaussian_selberg_rejects_bad_scale():
    with pytest.raises(DomainError):
        selberg_service.gaussian_selberg(2, 1.0, 0.0)


def test_ball_integral_in_the_plane():
    """Test ∫_{disk}(x−y)² = π/2 against polar quadrature"""
    closed = selberg_service.ball_vandermonde_integral(2, 1.0).value
    assert closed == pytest.approx(math.pi / 2.0, rel=1e-12)
    assert oracle_service.disk_polar_quadrature(1.0, 0.0) == pytest.approx(closed, abs=1e-10)


def test_ball_integral_three_dimensions_monte_carlo():
    value, stderr = oracle_service.ball_monte_carlo(3, 1.0, num_points=10_000_000, seed=42)
    closed = selberg_service.ball_vandermonde_integral(3, 1.0).value
    assert abs(value - closed) <= 3.0 * stderr


@pytest.mark.parametrize("n, R", [(2, 3.0), (4, 0.5), (6, 1.7)])
def test_ball_integral_radius_homogeneity(n, R):
    scaled = selberg_service.ball_vandermonde_integral(n, R).log
    unit = selberg_service.ball_vandermonde_integral(n, 1.0).log
    assert scaled - unit == pytest.approx(n * n * math.log(R), abs=1e-12)


def test_sphere_is_radial_derivative_of_ball():
    for n in (2, 5, 9):
        sphere = selberg_service.sphere_vandermonde_integral(n).value
        assert sphere == pytest.approx(n * n * selberg_service.ball_vandermonde_integral(n, 1.0).value, rel=1e-13)


@pytest.mark.parametrize("n, gamma, beta", [(2, 1.0, 4.0), (3, 0.5, 5.0), (4, 1.0, 12.0)])
def test_rational_integral_equals_generalized_ball(n, gamma, beta):
    rational = selberg_service.rational_selberg_integral(n, gamma, beta)
    ball = selberg_service.generalized_ball_integral(n, gamma, beta)
    assert rational.log == pytest.approx(ball.log, abs=1e-12)


def test_rational_integral_against_gamma_mixing():
    closed = selberg_service.rational_selberg_integral(2, 1.0, 4.0).value
    assert oracle_service.gamma_mixing_quadrature(2, 1.0, 4.0) == pytest.approx(closed, rel=1e-8)


def test_generalized_ball_against_polar_quadrature():
    n, gamma, beta = 2, 0.5, 2.0
    exponent = beta - selberg_service.homogeneity_degree(n, gamma) - 1
    closed = selberg_service.generalized_ball_integral(n, gamma, beta).value
    assert oracle_service.disk_polar_quadrature(gamma, exponent) == pytest.approx(closed, rel=1e-8)


def test_closed_form_domains():
    with pytest.raises(DomainError):
        selberg_service.rational_selberg_integral(2, 1.0, 2.0)
    with pytest.raises(DomainError):
        selberg_service.ball_vandermonde_integral(3, 0.0)
    with pytest.raises(DomainError):
        selberg_service.generalized_ball_integral(2, 1.0, 1.0)


def test_log_value_arithmetic():
    product = LogValue(math.log(3.0)) * LogValue(math.log(2.0), -1)
    assert product.value == pytest.approx(-6.0)
    assert (product / LogValue(math.log(2.0))).value == pytest.approx(-3.0)


def test_selberg_suite_passes():
    """Test every identity of the verify-selberg report"""
    rows = oracle_service.run_selberg_suite(mc_points=200_000, seed=0)
    assert len([row for row in rows if row.method == "tensor quadrature"]) >= 20
    failed = [(row.identity, row.params, row.relative_error) for row in rows if not row.passed]
    assert failed == []


def test_domain_errors_are_logged():
    messages = []
    sink = logger.add(messages.append, level="ERROR", format="{message}")
    try:
        with pytest.raises(DomainError):
            selberg_service.gaussian_selberg(2, 1.0, 0.0)
    finally:
        logger.remove(sink)
    assert any("gaussian_selberg" in message for message in messages)
