import math

import numpy as np
import pytest

from spherical_rmt.schemas.density import DensityGrid
from spherical_rmt.schemas.spectrum import Ensemble
from spherical_rmt.services import gue_service, specfun_service
from spherical_rmt.utils.exceptions import DomainError, InconsistencyError
from spherical_rmt.utils.quadrature import trapezoid


@pytest.mark.parametrize("N", [1, 2, 5, 20, 100])
def test_level_density_integrates_to_N(N):
    """Test ∫σ_GUE,N = N"""
    half_width = math.sqrt(2 * N) + 10.0
    x = np.linspace(-half_width, half_width, 20001)
    assert trapezoid(gue_service.gue_level_density(N, x), x) == pytest.approx(N, abs=1e-8)


def test_level_density_single_level():
    x = np.linspace(-3.0, 3.0, 25)
    np.testing.assert_allclose(gue_service.gue_level_density(1, x), np.exp(-(x**2)) / math.sqrt(math.pi), rtol=1e-14)


def test_level_density_is_even():
    x = np.linspace(0.0, 7.0, 50)
    np.testing.assert_allclose(gue_service.gue_level_density(9, x), gue_service.gue_level_density(9, -x), rtol=1e-13)


def test_level_density_at_origin_approaches_semicircle_height():
    """Test σ_GUE,20(0) is within 5% of √(2N)/π"""
    value = gue_service.gue_level_density(20, 0.0)
    assert value == pytest.approx(math.sqrt(40.0) / math.pi, rel=0.05)


@pytest.mark.parametrize("N", [0, 501])
def test_level_density_size_limits(N):
    with pytest.raises(DomainError):
        gue_service.gue_level_density(N, 0.0)


def test_semicircle_is_a_unit_density():
    x = np.linspace(-1.0, 1.0, 200001)
    assert trapezoid(gue_service.semicircle(x), x) == pytest.approx(1.0, abs=1e-6)
    assert gue_service.semicircle(1.5) == 0.0
    assert gue_service.semicircle(0.0, normalized=False) == 1.0


def test_default_support():
    assert gue_service.default_support(7, Ensemble.FIXED_TRACE) == (-1.0, 1.0)
    low, high = gue_service.default_support(2, Ensemble.GUE)
    assert high == pytest.approx(5.4)
    assert low == -high


def test_scale_gue_to_rho_single_level():
    """Test ρ for N=1 is √2·e^{−2x²}/√π with mass 1"""
    rho = gue_service.scale_gue_to_rho(1, gue_service.gue_grid(1))
    expected = math.sqrt(2.0) * np.exp(-2.0 * rho.points**2) / math.sqrt(math.pi)
    np.testing.assert_allclose(rho.values, expected, rtol=1e-12)
    assert rho.mass == 1.0
    assert rho.integral() == pytest.approx(1.0, abs=1e-6)


def test_scale_gue_to_rho_rejects_wrong_mass():
    with pytest.raises(InconsistencyError):
        gue_service.scale_gue_to_rho(4, gue_service.gue_grid(3))


def test_gue_rho_approaches_semicircle():
    """Test the rescaled exact GUE density moves toward the semicircle in the bulk"""
    distances = {}
    for N in (10, 100):
        rho = gue_service.scale_gue_to_rho(N, gue_service.gue_grid(N))
        bulk = np.abs(rho.points) <= 0.9
        points = rho.points[bulk]
        distances[N] = trapezoid(np.abs(rho.values[bulk] - gue_service.semicircle(points)), points)
    assert distances[100] <= 0.03
    assert distances[100] < distances[10]


def test_scale_fixed_trace_to_rho():
    """Test ρ_v,N carries mass 1 and the expected height at the origin"""
    N = 9
    x = np.linspace(-1.0, 1.0, 2001)
    sigma_v = DensityGrid(
        points=x,
        values=N * gue_service.semicircle(x),
        mass=float(N),
        N=N,
        kind="fixed_trace",
        support=(-1.0, 1.0),
    )
    rho = gue_service.scale_fixed_trace_to_rho(N, sigma_v)
    assert rho.mass == 1.0
    assert rho.support == pytest.approx((-1.5, 1.5))
    assert float(rho.interpolate(0.0)) == pytest.approx(4.0 / (math.pi * math.sqrt(N)), rel=1e-12)


@pytest.mark.parametrize("N", [1, 5, 30])
def test_adding_a_level_adds_one_squared_function(N):
    """Test σ_GUE,N+1 − σ_GUE,N = φ_N² ≥ 0"""
    x = np.linspace(-12.0, 12.0, 241)
    step = gue_service.gue_level_density(N + 1, x) - gue_service.gue_level_density(N, x)
    assert np.all(step >= 0.0)
    np.testing.assert_allclose(step, specfun_service.hermite_phi(N, x) ** 2, rtol=1e-10, atol=1e-15)


def test_level_density_positive_beyond_the_edge():
    """Test σ_GUE,500 stays positive and decreasing out to its histogram support"""
    high = gue_service.default_support(500, Ensemble.GUE)[1]
    x = np.array([38.0, 39.0, 40.0, high])
    values = gue_service.gue_level_density(500, x)
    assert np.all(values > 0.0)
    assert np.all(np.diff(values) < 0.0)


def test_gue_rho_sup_distance_in_the_bulk():
    """Test N=100 sup over |x| ≤ 0.9 of |ρ − semicircle| is at most 0.02"""
    rho = gue_service.scale_gue_to_rho(100, gue_service.gue_grid(100))
    bulk = np.abs(rho.points) <= 0.9
    sup = np.max(np.abs(rho.values[bulk] - gue_service.semicircle(rho.points[bulk])))
    assert sup <= 0.02
