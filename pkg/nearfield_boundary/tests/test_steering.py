import math

import numpy as np
import pytest
import torch
from fire import Fire

from nearfield_boundary.config import ArrayKind, ArraySpec, GridPlane, RotationAngles
from nearfield_boundary.errors import InvalidArgumentError
from nearfield_boundary.model.geometry import (
    build_grid,
    compose_rotation,
    rotate_grid,
    rotation_z,
)
from nearfield_boundary.model.steering import (
    CompensationVector,
    effective_distance,
    ula_compensation,
    upa_compensation,
)
from nearfield_boundary.util.reduction import reduce_pair_extremes

WAVELENGTH = 1e-3


@pytest.mark.parametrize("theta", [0.0, 0.3, -0.7, math.pi / 2, -math.pi / 2])
def test_ula_closed_form_matches_projection(theta):
    spec = ArraySpec(ArrayKind.ULA, 10 * WAVELENGTH, 21)
    local = build_grid(spec, WAVELENGTH, (0.0, 0.0, 0.0), GridPlane.UE)
    projected = upa_compensation(rotate_grid(local, rotation_z(theta)))
    closed_form = ula_compensation(spec, theta, WAVELENGTH)
    assert np.allclose(closed_form.per_element_m, projected.per_element_m, atol=1e-15)
    assert closed_form.per_element_m.min() == pytest.approx(0.0, abs=1e-15)
    assert closed_form.spread_m == pytest.approx(
        spec.effective_aperture_m(WAVELENGTH) * abs(math.sin(theta)), abs=1e-15
    )


def test_ula_ramp_direction():
    spec = ArraySpec(ArrayKind.ULA, 2 * WAVELENGTH, 5)
    rising = ula_compensation(spec, 0.5, WAVELENGTH).per_element_m
    falling = ula_compensation(spec, -0.5, WAVELENGTH).per_element_m
    assert np.all(np.diff(rising) > 0)
    assert np.all(np.diff(falling) < 0)
    assert np.allclose(rising, falling[::-1])


def test_ula_compensation_needs_ula():
    with pytest.raises(InvalidArgumentError):
        ula_compensation(ArraySpec(ArrayKind.UPA, WAVELENGTH, 3), 0.1, WAVELENGTH)


def test_upa_compensation_offset():
    spec = ArraySpec(ArrayKind.UPA, 4 * WAVELENGTH, 9)
    local = build_grid(spec, WAVELENGTH, (0.0, 0.0, 0.0), GridPlane.UE)
    angles = RotationAngles(math.pi / 6, math.pi / 5)
    compensation = upa_compensation(rotate_grid(local, compose_rotation(angles)))
    half = spec.effective_aperture_m(WAVELENGTH) / 2
    expected_offset = half * (
        abs(math.cos(angles.phi_rad) * math.sin(angles.theta_rad))
        + abs(math.sin(angles.phi_rad))
    )
    assert compensation.reference_offset_m == pytest.approx(expected_offset)
    assert compensation.per_element_m.min() == pytest.approx(0.0, abs=1e-15)
    assert len(compensation) == 81


def test_upa_compensation_needs_rotated_grid():
    spec = ArraySpec(ArrayKind.UPA, WAVELENGTH, 3)
    local = build_grid(spec, WAVELENGTH, (0.0, 0.0, 0.0), GridPlane.UE)
    with pytest.raises(InvalidArgumentError):
        upa_compensation(local)


def test_compensation_vector_validation():
    with pytest.raises(InvalidArgumentError):
        CompensationVector(np.array([0.0, -1e-3]), 0.0)
    with pytest.raises(InvalidArgumentError):
        CompensationVector(np.array([]), 0.0)


def test_effective_distance():
    assert effective_distance((0.0, 3.0, 4.0), (0.0, 0.0, 0.0), 0.5) == 5.5


@pytest.mark.parametrize("shift", [1e-4, 0.003, 0.25])
def test_constant_compensation_shift_keeps_spread(shift):
    ue_spec = ArraySpec(ArrayKind.UPA, 4 * WAVELENGTH, 9)
    local = build_grid(ue_spec, WAVELENGTH, (0.0, 0.0, 0.0), GridPlane.UE)
    rotated = rotate_grid(local, compose_rotation(RotationAngles(0.6, -0.4)))
    ap_spec = ArraySpec(ArrayKind.UPA, 6 * WAVELENGTH, 13)
    ap = build_grid(ap_spec, WAVELENGTH, (0.0, 0.05, 0.0), GridPlane.AP)
    compensation = upa_compensation(rotated)
    shifted = CompensationVector(
        compensation.per_element_m + shift, compensation.reference_offset_m + shift
    )

    def spread(vector: CompensationVector) -> float:
        extremes = reduce_pair_extremes(
            torch.tensor(ap.positions, dtype=torch.float64),
            torch.tensor(rotated.positions, dtype=torch.float64),
            torch.tensor(vector.per_element_m, dtype=torch.float64),
        )
        return extremes.max_value - extremes.min_value

    assert spread(shifted) == pytest.approx(spread(compensation), abs=1e-12)
    assert shifted.spread_m == pytest.approx(compensation.spread_m, abs=1e-12)


if __name__ == "__main__":
    Fire()
