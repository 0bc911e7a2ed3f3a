"""
This module builds antenna element grids and rotates the UE array.

The UE array is centered at the origin in the xz-plane, the AP array is centered at (0, d, 0) parallel to it.
UPA elements are stored row-major with (m, n) = (x-index, z-index) in ascending coordinate order, so the
flat index of element (m, n) is m * N + n.

Classes:
    ElementGrid: An ordered set of 3D element positions.

Functions:
    rotation_x: Rotation matrix around the x-axis.
    rotation_z: Rotation matrix around the z-axis.
    compose_rotation: The UE rotation R_z(phi) R_x(theta).
    scenario_rotation: The rotation applied to the UE of a scenario.
    axis_offsets: Element offsets along one axis of an array.
    build_grid: Element positions of an array.
    rotate_grid: Rotate a UE grid into the global frame.
"""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import numpy.typing as npt

from nearfield_boundary.config import (
    ArrayKind,
    ArraySpec,
    Frame,
    GridPlane,
    RotationAngles,
    Scenario,
    ScenarioConfig,
)
from nearfield_boundary.errors import InvalidArgumentError

Matrix3 = npt.NDArray[np.float64]

CENTER_TOLERANCE_M = 1e-12


def _frozen(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


def _check_finite(value: float, name: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise InvalidArgumentError(f"{name} must be finite, got {value}")
    return value


def rotation_x(theta_rad: float) -> Matrix3:
    theta_rad = _check_finite(theta_rad, "theta")
    cos, sin = math.cos(theta_rad), math.sin(theta_rad)
    return _frozen(
        np.array(
            [
                [1.0, 0.0, 0.0],
                [0.0, cos, -sin],
                [0.0, sin, cos],
            ]
        )
    )


def rotation_z(phi_rad: float) -> Matrix3:
    phi_rad = _check_finite(phi_rad, "phi")
    cos, sin = math.cos(phi_rad), math.sin(phi_rad)
    return _frozen(
        np.array(
            [
                [cos, -sin, 0.0],
                [sin, cos, 0.0],
                [0.0, 0.0, 1.0],
            ]
        )
    )


def compose_rotation(angles: RotationAngles) -> Matrix3:
    """
    The UE rotation: first theta around the x-axis, then phi around the z-axis.

    Args:
        angles (RotationAngles): The misalignment angles.

    Returns:
        Matrix3: R_z(phi) @ R_x(theta).
    """
    return _frozen(rotation_z(angles.phi_rad) @ rotation_x(angles.theta_rad))


def scenario_rotation(config: ScenarioConfig) -> Matrix3:
    """
    The rotation applied to the UE of a scenario.

    A ULA lies on the x-axis, where a rotation around x would not move it. The ULA scenario therefore rotates
    the UE by theta around the z-axis, within the plane that holds both arrays.
    """
    if config.scenario is Scenario.ULA_ULA:
        return rotation_z(config.angles.theta_rad)
    return compose_rotation(config.angles)


def axis_offsets(spec: ArraySpec, wavelength_m: float) -> np.ndarray:
    """
    Element offsets from the array center along one axis, ascending, spaced by lambda / 2.
    """
    index = np.arange(spec.elements_per_axis, dtype=np.float64)
    return (index - (spec.elements_per_axis - 1) / 2) * ArraySpec.spacing_m(wavelength_m)


@dataclass(frozen=True, eq=False)
class ElementGrid:
    """
    An ordered set of 3D element positions in meters.

    Attributes:
        positions (np.ndarray): (num_elements, 3) read-only array, row-major (m, n) order for UPAs.
        frame (Frame): UE_LOCAL before rotation, GLOBAL afterwards (AP grids are always GLOBAL).
        center (tuple[float, float, float]): The declared array center.
        elements_per_axis (int): N, used to map flat indices back to (m, n).
        kind (ArrayKind): The array kind.
    """

    positions: np.ndarray
    frame: Frame
    center: tuple[float, float, float]
    elements_per_axis: int
    kind: ArrayKind

    def __len__(self) -> int:
        return self.positions.shape[0]

    def centroid(self) -> np.ndarray:
        return self.positions.mean(axis=0)

    def grid_index(self, flat_index: int) -> tuple[int, int]:
        if self.kind is ArrayKind.ULA:
            return flat_index, 0
        return divmod(flat_index, self.elements_per_axis)


def build_grid(
    spec: ArraySpec,
    wavelength_m: float,
    center: Sequence[float],
    plane: GridPlane,
) -> ElementGrid:
    """
    Element positions of an array in the xz-plane through `center`.

    ULA elements lie along the x-axis, UPA elements on a square x/z grid. The UE must be centered at the
    origin and the AP at (0, d, 0) with d > 0.

    Args:
        spec (ArraySpec): The array.
        wavelength_m (float): The wavelength in meters.
        center (Sequence[float]): The array center.
        plane (GridPlane): GridPlane.UE or GridPlane.AP.

    Returns:
        ElementGrid: The grid, UE_LOCAL for the UE and GLOBAL for the AP.

    Raises:
        InvalidArgumentError: On a non-positive wavelength or an invalid plane/center combination.
    """
    if not wavelength_m > 0:
        raise InvalidArgumentError(f"wavelength_m must be positive, got {wavelength_m}")
    center = tuple(float(value) for value in center)
    if len(center) != 3:
        raise InvalidArgumentError(f"center must be a 3D point, got {center}")
    if plane is GridPlane.UE and center != (0.0, 0.0, 0.0):
        raise InvalidArgumentError(f"The UE array is centered at the origin, got {center}")
    if plane is GridPlane.AP and not (
        center[0] == 0.0 and center[2] == 0.0 and center[1] > 0
    ):
        raise InvalidArgumentError(
            f"The AP array is centered at (0, d, 0) with d > 0, got {center}"
        )

    offsets = axis_offsets(spec, wavelength_m)
    if spec.kind is ArrayKind.ULA:
        x = offsets
        z = np.zeros_like(offsets)
    else:
        x, z = np.meshgrid(offsets, offsets, indexing="ij")
        x, z = x.ravel(), z.ravel()
    positions = np.stack(
        [x + center[0], np.full_like(x, center[1]), z + center[2]], axis=1
    )
    return ElementGrid(
        positions=_frozen(positions),
        frame=Frame.UE_LOCAL if plane is GridPlane.UE else Frame.GLOBAL,
        center=center,
        elements_per_axis=spec.elements_per_axis,
        kind=spec.kind,
    )


def rotate_grid(grid: ElementGrid, rotation: Matrix3) -> ElementGrid:
    """
    Rotates a UE grid around the origin: every position is left-multiplied by `rotation`.

    Args:
        grid (ElementGrid): A UE_LOCAL grid centered at the origin.
        rotation (Matrix3): The rotation matrix.

    Returns:
        ElementGrid: The grid in the GLOBAL frame.

    Raises:
        InvalidArgumentError: If the grid is not an origin-centered UE grid.
    """
    if grid.frame is not Frame.UE_LOCAL or any(
        abs(value) > CENTER_TOLERANCE_M for value in grid.center
    ):
        raise InvalidArgumentError(
            "Only origin-centered UE grids can be rotated, "
            f"got a {grid.frame.value} grid centered at {grid.center}"
        )
    rotation = np.asarray(rotation, dtype=np.float64)
    if rotation.shape != (3, 3):
        raise InvalidArgumentError(f"rotation must be 3x3, got {rotation.shape}")
    return ElementGrid(
        positions=_frozen(grid.positions @ rotation.T),
        frame=Frame.GLOBAL,
        center=grid.center,
        elements_per_axis=grid.elements_per_axis,
        kind=grid.kind,
    )
