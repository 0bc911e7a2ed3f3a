"""
This module collects the closed-form near-field (Fraunhofer) distances under UE misalignment.

All distances are in meters. D1 is the AP aperture, D2 the UE aperture, lambda the wavelength. ULA forms take
theta only; one-angle UPA forms take theta with phi = 0; the two-angle UPA form only exists as an
approximation.

Classes:
    FormulaInput: Apertures, wavelength and angles of a closed-form evaluation.
    AppendixError: The effective-plane approximation error and its bound.

Functions:
    aligned_ula, aligned_upa: Baselines without misalignment.
    ula_exact, ula_approx: ULA-ULA with rotation theta.
    upa1_exact, upa1_approx: UPA-UPA with rotation theta.
    upa2_approx: UPA-UPA with rotations (theta, phi).
    intermediate_d_e: The largest lateral distance between the projected UE and the AP.
    compensation_offset: The global compensation offset delta d.
    appendix_error: The error of replacing the compensated UE by its effective plane.
    appendix_premises_hold: Whether the premises of the error bound hold.
    closed_form_distance: Dispatch a scenario to its closed form.
    has_exact_form: Whether a scenario has an exact closed form.
    closed_form_phase_spread: The predicted maximum phase mismatch at a separation.
    misalignment_reduction: Relative variation (max - min) / max of a series of distances.
"""

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from nearfield_boundary.config import (
    Method,
    RotationAngles,
    Scenario,
    ScenarioConfig,
    check_angle,
)
from nearfield_boundary.constants import PHASE_MISMATCH_LIMIT_RAD
from nearfield_boundary.errors import FormulaUnavailableError, InvalidArgumentError
from nearfield_boundary.model.geometry import compose_rotation


@dataclass(frozen=True)
class FormulaInput:
    """
    Inputs of a closed-form evaluation.

    Attributes:
        d1_m (float): AP aperture D1.
        d2_m (float): UE aperture D2.
        wavelength_m (float): Wavelength lambda.
        theta_rad (float): Rotation around the x-axis (the in-plane rotation for ULAs).
        phi_rad (float): Rotation around the z-axis.
    """

    d1_m: float
    d2_m: float
    wavelength_m: float
    theta_rad: float = 0.0
    phi_rad: float = 0.0

    def __post_init__(self):
        for name in ("d1_m", "d2_m", "wavelength_m"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidArgumentError(f"{name} must be positive, got {value}")
        object.__setattr__(self, "theta_rad", check_angle(self.theta_rad, "theta"))
        object.__setattr__(self, "phi_rad", check_angle(self.phi_rad, "phi"))

    @classmethod
    def from_scenario(cls, config: ScenarioConfig) -> "FormulaInput":
        """
        Uses the effective apertures, so closed forms and simulator share the same geometry.
        """
        return cls(
            config.ap_aperture_m,
            config.ue_aperture_m,
            config.wavelength_m,
            config.angles.theta_rad,
            config.angles.phi_rad,
        )


def _require_one_angle(values: FormulaInput, name: str):
    if values.phi_rad != 0:
        raise InvalidArgumentError(
            f"{name} takes theta only, got phi={values.phi_rad}"
        )


def aligned_ula(d1_m: float, d2_m: float, wavelength_m: float) -> float:
    return 2 * (d1_m + d2_m) ** 2 / wavelength_m


def aligned_upa(d1_m: float, d2_m: float, wavelength_m: float) -> float:
    return 4 * (d1_m + d2_m) ** 2 / wavelength_m


def _projected_term(values: FormulaInput) -> float:
    return 2 * (values.d1_m + values.d2_m * math.cos(values.theta_rad)) ** 2 / (
        values.wavelength_m
    )


def _rotation_offset(values: FormulaInput) -> float:
    return values.d2_m / 2 * abs(math.sin(values.theta_rad))


def ula_approx(values: FormulaInput) -> float:
    """
    ULA-ULA near-field distance, 2 (D1 + D2 cos(theta))^2 / lambda.
    """
    _require_one_angle(values, "ula_approx")
    return _projected_term(values)


def ula_exact(values: FormulaInput) -> float:
    """
    ULA-ULA near-field distance, 2 (D1 + D2 cos(theta))^2 / lambda + (D2 / 2) |sin(theta)|.

    The second term is the compensation offset of the rotated UE; it does not scale with 1 / lambda.
    """
    _require_one_angle(values, "ula_exact")
    return _projected_term(values) + _rotation_offset(values)


def upa1_approx(values: FormulaInput) -> float:
    """
    UPA-UPA near-field distance for a rotation theta only, 2 ((D1 + D2)^2 + (D1 + D2 cos(theta))^2) / lambda.

    The first term is the aligned direction, the second the direction shortened by the rotation.
    """
    _require_one_angle(values, "upa1_approx")
    return aligned_ula(values.d1_m, values.d2_m, values.wavelength_m) + _projected_term(
        values
    )


def upa1_exact(values: FormulaInput) -> float:
    _require_one_angle(values, "upa1_exact")
    return (
        aligned_ula(values.d1_m, values.d2_m, values.wavelength_m)
        + _projected_term(values)
        + _rotation_offset(values)
    )


def _projected_half_extents(values: FormulaInput) -> tuple[float, float]:
    # largest |x_UE| and |z_UE| of the rotated UE, both attained at the same corner
    x_extent = (
        values.d2_m
        / 2
        * (math.cos(values.phi_rad) + abs(math.sin(values.phi_rad) * math.sin(values.theta_rad)))
    )
    z_extent = values.d2_m / 2 * math.cos(values.theta_rad)
    return x_extent, z_extent


def upa2_approx(values: FormulaInput) -> float:
    """
    UPA-UPA near-field distance for rotations (theta, phi).

    2 (D1 + D2 (cos(phi) + |sin(phi) sin(theta)|))^2 / lambda + 2 (D1 + D2 cos(theta))^2 / lambda.
    Reduces to `upa1_approx` for phi = 0.
    """
    return (
        2
        * (
            values.d1_m
            + values.d2_m
            * (math.cos(values.phi_rad) + abs(math.sin(values.phi_rad) * math.sin(values.theta_rad)))
        )
        ** 2
        / values.wavelength_m
        + _projected_term(values)
    )


def intermediate_d_e(values: FormulaInput) -> float:
    """
    The largest distance between the UE projected onto the AP plane and an AP element.

    upa2_approx equals 8 d_e^2 / lambda.
    """
    x_extent, z_extent = _projected_half_extents(values)
    return math.hypot(values.d1_m / 2 + x_extent, values.d1_m / 2 + z_extent)


def compensation_offset(values: FormulaInput) -> float:
    """
    The global compensation offset delta d = (D2 / 2) (|cos(phi) sin(theta)| + |sin(phi)|).
    """
    return values.d2_m / 2 * (
        abs(math.cos(values.phi_rad) * math.sin(values.theta_rad))
        + abs(math.sin(values.phi_rad))
    )


@dataclass(frozen=True)
class AppendixError:
    """
    Attributes:
        f_value_m (float): d(E, P) + d(E, E') - d(E', P).
        bound_m (float): D2 (D1 + D2)^2 / (4 d^2).
    """

    f_value_m: float
    bound_m: float

    @property
    def within_bound(self) -> bool:
        return self.f_value_m <= self.bound_m + 1e-15


def appendix_error(
    values: FormulaInput,
    d_m: float,
    ue_point: tuple[float, float],
    ap_point: tuple[float, float],
) -> AppendixError:
    """
    The error of measuring from the effective plane instead of the compensated UE element.

    E is the rotated UE point (x, 0, z), E' its image on the effective plane y = -delta d and P the AP point
    (x_AP, d, z_AP). The error is evaluated from the geometry, not from its Taylor expansion.

    Args:
        values (FormulaInput): Apertures and angles.
        d_m (float): The AP-UE separation.
        ue_point (tuple[float, float]): (x, z) of the UE point before rotation, within [-D2/2, D2/2].
        ap_point (tuple[float, float]): (x_AP, z_AP) of the AP point, within [-D1/2, D1/2].

    Returns:
        AppendixError: The error and its bound.
    """
    if not d_m > 0:
        raise InvalidArgumentError(f"d_m must be positive, got {d_m}")
    x, z = ue_point
    x_ap, z_ap = ap_point
    if max(abs(x), abs(z)) > values.d2_m / 2 or max(abs(x_ap), abs(z_ap)) > (
        values.d1_m / 2
    ):
        raise InvalidArgumentError("Points must lie within their apertures")
    rotation = compose_rotation(RotationAngles(values.theta_rad, values.phi_rad))
    ue = rotation @ np.array([x, 0.0, z])
    ap = np.array([x_ap, d_m, z_ap])
    offset = compensation_offset(values)
    effective = np.array([ue[0], -offset, ue[2]])
    f_value = (
        math.dist(ue, ap) + math.dist(ue, effective) - math.dist(effective, ap)
    )
    bound = values.d2_m * (values.d1_m + values.d2_m) ** 2 / (4 * d_m**2)
    return AppendixError(f_value, bound)


def appendix_premises_hold(values: FormulaInput) -> bool:
    """
    Whether delta d <= D2 / 2 and the projected UE half-extents are <= D2 / 2, the premises of the bound.

    Both hold for rotations in a single plane (theta only or phi only).
    """
    half = values.d2_m / 2 * (1 + 1e-12)
    x_extent, z_extent = _projected_half_extents(values)
    return compensation_offset(values) <= half and max(x_extent, z_extent) <= half


def _upa_exact(values: FormulaInput) -> float:
    if values.phi_rad != 0:
        raise FormulaUnavailableError(
            "No exact closed form exists for a UPA rotated in two planes"
        )
    return upa1_exact(values)


# Map (scenario, method) to its closed form
formula_map: dict[tuple[Scenario, Method], Callable[[FormulaInput], float]] = {
    (Scenario.ULA_ULA, Method.EXACT): ula_exact,
    (Scenario.ULA_ULA, Method.APPROX): ula_approx,
    (Scenario.UPA_UPA, Method.EXACT): _upa_exact,
    (Scenario.UPA_UPA, Method.APPROX): upa2_approx,
}


def has_exact_form(config: ScenarioConfig) -> bool:
    return config.scenario is Scenario.ULA_ULA or config.angles.phi_rad == 0


def closed_form_distance(config: ScenarioConfig, method: Method) -> float:
    """
    The closed-form near-field distance of a scenario, evaluated on the effective apertures.

    Args:
        config (ScenarioConfig): The scenario.
        method (Method): Method.EXACT or Method.APPROX.

    Returns:
        float: The near-field distance in meters.

    Raises:
        FormulaUnavailableError: For Method.EXACT on a UPA rotated in two planes.
        InvalidArgumentError: For Method.SIMULATED.
    """
    if method is Method.SIMULATED:
        raise InvalidArgumentError("The simulated distance has no closed form")
    return formula_map[(config.scenario, method)](FormulaInput.from_scenario(config))


def closed_form_phase_spread(
    d_m: float, d_f_m: float, offset_m: float = 0.0
) -> float:
    """
    The maximum phase mismatch predicted by a closed form at separation d.

    The effective-distance spread falls as 1 / (d - offset), so the mismatch is pi/8 (d_F - offset) / (d - offset).
    Use offset (D2 / 2) |sin(theta)| with the exact forms and 0 with the approximations.
    """
    if not d_m > offset_m:
        raise InvalidArgumentError(f"d_m must exceed {offset_m}, got {d_m}")
    return PHASE_MISMATCH_LIMIT_RAD * (d_f_m - offset_m) / (d_m - offset_m)


def misalignment_reduction(distances: Iterable[float]) -> float:
    values = np.asarray(list(distances), dtype=np.float64)
    return float((values.max() - values.min()) / values.max())
