"""
This module expresses UE beam-steering phase compensation as a per-element distance.

Steering the UE beam towards the AP (direction n_y = (0, 1, 0)) delays each element by its projection on n_y.
Shifted by the global offset |min_k (r_k . n_y)|, the compensation is non-negative and zero at the reference
element. Adding the same constant to every element does not change the spread of effective distances, so the
choice of reference element is free.

Classes:
    CompensationVector: Per-element compensation distances.

Functions:
    ula_compensation: Closed-form compensation of a ULA rotated by theta.
    upa_compensation: Projection-based compensation of any rotated grid.
    effective_distance: Geometric element distance plus compensation.
"""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from nearfield_boundary.config import ArrayKind, ArraySpec, Frame
from nearfield_boundary.errors import InvalidArgumentError
from nearfield_boundary.model.geometry import ElementGrid, axis_offsets

BORESIGHT = np.array([0.0, 1.0, 0.0])


@dataclass(frozen=True, eq=False)
class CompensationVector:
    """
    Per-element compensation distances of the UE, aligned with the ElementGrid ordering.

    Attributes:
        per_element_m (np.ndarray): Non-negative compensation per UE element in meters, minimum 0.
        reference_offset_m (float): The global shift (delta d) that makes the minimum zero.
    """

    per_element_m: np.ndarray
    reference_offset_m: float

    def __post_init__(self):
        values = np.asarray(self.per_element_m, dtype=np.float64)
        if values.size == 0:
            raise InvalidArgumentError("A compensation vector needs at least one element")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise InvalidArgumentError("Compensation distances must be finite and >= 0")
        values.flags.writeable = False
        object.__setattr__(self, "per_element_m", values)

    def __len__(self) -> int:
        return self.per_element_m.size

    @property
    def spread_m(self) -> float:
        return float(self.per_element_m.max() - self.per_element_m.min())


def ula_compensation(
    spec_ue: ArraySpec, theta_rad: float, wavelength_m: float
) -> CompensationVector:
    """
    Closed-form compensation of a ULA rotated in-plane by theta.

    Adjacent elements differ by (lambda / 2) * |sin(theta)|. For theta >= 0 the ramp rises with the element index,
    for theta < 0 it falls, so the element needing no compensation is the edge element closest to the AP.

    Args:
        spec_ue (ArraySpec): The UE array, must be a ULA.
        theta_rad (float): The rotation angle.
        wavelength_m (float): The wavelength in meters.

    Returns:
        CompensationVector: Compensation per element, maximum D_eff * |sin(theta)|.

    Raises:
        InvalidArgumentError: If the array is not a ULA.
    """
    if spec_ue.kind is not ArrayKind.ULA:
        raise InvalidArgumentError(
            f"ula_compensation needs a ULA, got {spec_ue.kind.value}"
        )
    sin = math.sin(theta_rad)
    half_aperture = spec_ue.effective_aperture_m(wavelength_m) / 2
    # x_k * sin(theta) shifted by the offset, same arithmetic as the projection
    x = axis_offsets(spec_ue, wavelength_m)
    offset = half_aperture * abs(sin)
    per_element = np.maximum(x * sin + offset, 0.0)
    return CompensationVector(per_element, offset)


def upa_compensation(rotated_ue: ElementGrid) -> CompensationVector:
    """
    Projection-based compensation of a rotated UE grid.

    per_element[k] = r_k . n_y + |min_j (r_j . n_y)|. Works for any origin-centered grid in the global frame,
    the ULA scenario included.

    Args:
        rotated_ue (ElementGrid): The UE grid in the GLOBAL frame.

    Returns:
        CompensationVector: The compensation vector.

    Raises:
        InvalidArgumentError: If the grid is empty or not in the global frame.
    """
    if len(rotated_ue) == 0:
        raise InvalidArgumentError("Cannot compensate an empty grid")
    if rotated_ue.frame is not Frame.GLOBAL:
        raise InvalidArgumentError("Compensation needs a rotated (GLOBAL) UE grid")
    projection = rotated_ue.positions @ BORESIGHT
    offset = abs(float(projection.min()))
    return CompensationVector(projection + offset, offset)


def effective_distance(
    ap_pos: Sequence[float], ue_pos: Sequence[float], compensation_m: float
) -> float:
    """
    Euclidean distance between an AP and a UE element plus the UE element's compensation distance.
    """
    return math.dist(ap_pos, ue_pos) + compensation_m
