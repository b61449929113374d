import numpy as np
import pytest

from spherical_rmt.schemas.density import DensityGrid
from spherical_rmt.utils.exceptions import DomainError, InconsistencyError


def histogram_grid():
    """Four unit-height bins of width 0.5 on [-1, 1], tabulated at bin centers"""
    return DensityGrid(
        points=[-0.75, -0.25, 0.25, 0.75],
        values=[1.0, 1.0, 1.0, 1.0],
        mass=2.0,
        N=2,
        kind="fixed_trace",
        support=(-1.0, 1.0),
    )


def test_support_extension_gives_bin_sum():
    grid = histogram_grid()
    assert grid.integral() == pytest.approx(2.0, abs=1e-15)


def test_interpolation_vanishes_outside_support():
    grid = histogram_grid()
    np.testing.assert_allclose(grid.interpolate([-1.5, -0.9, 0.0, 0.99, 1.01]), [0.0, 1.0, 1.0, 1.0, 0.0])


def test_grid_arrays_are_read_only():
    grid = histogram_grid()
    with pytest.raises(ValueError):
        grid.values[0] = 5.0


def test_declared_mass_must_match():
    with pytest.raises(InconsistencyError):
        DensityGrid(points=[0.0, 1.0], values=[1.0, 1.0], mass=3.0)


@pytest.mark.parametrize(
    "points, values",
    [([0.0], [1.0]), ([0.0, 0.0, 1.0], [1.0, 1.0, 1.0]), ([0.0, 1.0], [-1.0, 3.0]), ([0.0, 1.0], [1.0])],
)
def test_invalid_grids(points, values):
    with pytest.raises(DomainError):
        DensityGrid(points=points, values=values, mass=1.0)


def test_points_must_lie_in_support():
    with pytest.raises(DomainError):
        DensityGrid(points=[0.0, 2.0], values=[0.5, 0.5], mass=1.0, support=(0.0, 1.0))


def test_restrict_declares_own_mass():
    grid = histogram_grid()
    inner = grid.restrict(-0.5, 0.5)
    assert list(inner.points) == [-0.25, 0.25]
    assert inner.mass == pytest.approx(0.5)
    assert inner.support is None


def test_csv_layout_and_reload():
    grid = histogram_grid()
    text = grid.to_csv()
    lines = text.splitlines()
    assert lines[0] == "# mass=2.0 N=2 kind=fixed_trace"
    assert lines[1] == "x,density"
    assert lines[2] == "-0.75,1"
    reloaded = DensityGrid.from_csv(text, support=(-1.0, 1.0))
    np.testing.assert_array_equal(reloaded.points, grid.points)
    assert reloaded.mass == 2.0
    assert reloaded.N == 2


def test_json_payload_is_versioned():
    payload = histogram_grid().to_json_dict()
    assert payload["schema_version"] == 1
    assert payload["support"] == [-1.0, 1.0]
    assert payload["errors"] is None
