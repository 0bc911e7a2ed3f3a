import math

import numpy as np
import pytest
from fire import Fire

from nearfield_boundary.config import (
    ArrayKind,
    ArraySpec,
    Frame,
    FrequencyConfig,
    GridPlane,
    RotationAngles,
    Scenario,
    ScenarioConfig,
)
from nearfield_boundary.errors import InvalidArgumentError
from nearfield_boundary.model.geometry import (
    build_grid,
    compose_rotation,
    rotate_grid,
    rotation_x,
    rotation_z,
    scenario_rotation,
)

WAVELENGTH = 1e-3


def test_rotations_are_proper():
    for matrix in (
        rotation_x(0.3),
        rotation_z(-1.1),
        compose_rotation(RotationAngles(math.pi / 6, math.pi / 5)),
    ):
        assert np.allclose(matrix @ matrix.T, np.eye(3), atol=1e-15)
        assert np.linalg.det(matrix) == pytest.approx(1.0)


def test_compose_rotation_order():
    angles = RotationAngles(0.4, -0.7)
    expected = rotation_z(-0.7) @ rotation_x(0.4)
    assert np.array_equal(compose_rotation(angles), expected)
    assert np.array_equal(compose_rotation(RotationAngles(0.4)), rotation_x(0.4))


def test_rotation_rejects_non_finite():
    with pytest.raises(InvalidArgumentError):
        rotation_x(float("nan"))


def test_element_counts_at_300_ghz():
    frequency = FrequencyConfig.from_frequency(300e9)
    assert ArraySpec.from_aperture(ArrayKind.UPA, 0.1, frequency.wavelength_m).elements_per_axis == 201
    assert ArraySpec.from_aperture(ArrayKind.UPA, 0.05, frequency.wavelength_m).elements_per_axis == 101
    spec = ArraySpec.from_aperture(ArrayKind.UPA, 0.1, frequency.wavelength_m)
    assert spec.num_elements == 201**2
    assert abs(spec.aperture_discrepancy_m(frequency.wavelength_m)) <= frequency.wavelength_m / 4


def test_upa_grid_is_row_major():
    spec = ArraySpec(ArrayKind.UPA, WAVELENGTH, 3)
    grid = build_grid(spec, WAVELENGTH, (0.0, 0.0, 0.0), GridPlane.UE)
    s = WAVELENGTH / 2
    assert len(grid) == 9
    assert np.allclose(grid.positions[1], [-s, 0.0, 0.0])
    assert np.allclose(grid.positions[3], [0.0, 0.0, -s])
    assert np.allclose(grid.positions[8], [s, 0.0, s])
    assert grid.grid_index(5) == (1, 2)
    assert np.allclose(grid.centroid(), 0.0, atol=1e-18)
    assert grid.frame is Frame.UE_LOCAL


def test_ap_grid_centered_on_boresight():
    spec = ArraySpec(ArrayKind.ULA, 2 * WAVELENGTH, 5)
    grid = build_grid(spec, WAVELENGTH, (0.0, 3.0, 0.0), GridPlane.AP)
    assert grid.frame is Frame.GLOBAL
    assert np.all(grid.positions[:, 1] == 3.0)
    assert np.allclose(grid.positions[[0, -1], 0], [-WAVELENGTH, WAVELENGTH])
    assert not grid.positions.flags.writeable


@pytest.mark.parametrize(
    "center, plane",
    [
        ((0.0, 1.0, 0.0), GridPlane.UE),
        ((0.0, 0.0, 0.0), GridPlane.AP),
        ((0.1, 2.0, 0.0), GridPlane.AP),
        ((0.0, -2.0, 0.0), GridPlane.AP),
    ],
)
def test_build_grid_rejects_misplaced_centers(center, plane):
    spec = ArraySpec(ArrayKind.UPA, WAVELENGTH, 3)
    with pytest.raises(InvalidArgumentError):
        build_grid(spec, WAVELENGTH, center, plane)


def test_rotate_grid_preserves_distances():
    spec = ArraySpec(ArrayKind.UPA, 2 * WAVELENGTH, 5)
    local = build_grid(spec, WAVELENGTH, (0.0, 0.0, 0.0), GridPlane.UE)
    rotated = rotate_grid(local, compose_rotation(RotationAngles(0.5, -0.3)))
    assert rotated.frame is Frame.GLOBAL

    def pairwise(points):
        return np.linalg.norm(points[:, None] - points[None, :], axis=-1)

    assert np.allclose(pairwise(local.positions), pairwise(rotated.positions), atol=1e-15)
    with pytest.raises(InvalidArgumentError):
        rotate_grid(rotated, rotation_x(0.1))


def test_ula_scenario_rotates_in_plane():
    config = ScenarioConfig.from_apertures(
        Scenario.ULA_ULA,
        0.01,
        0.005,
        FrequencyConfig.from_wavelength(WAVELENGTH),
        RotationAngles(math.pi / 3),
    )
    assert np.array_equal(scenario_rotation(config), rotation_z(math.pi / 3))
    local = build_grid(config.ue, WAVELENGTH, (0.0, 0.0, 0.0), GridPlane.UE)
    rotated = rotate_grid(local, scenario_rotation(config))
    assert rotated.positions[:, 1].max() == pytest.approx(
        config.ue_aperture_m / 2 * math.sin(math.pi / 3)
    )


if __name__ == "__main__":
    Fire()
