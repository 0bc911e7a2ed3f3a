"""
This module simulates the spread of effective distances between a rotated UE array and an AP array, and solves
for the near-field distance at which the spread equals lambda/16 (a phase mismatch of pi/8).

Two pair searches are available. SearchMode.FULL enumerates every AP-UE pair in chunks. SearchMode.EXTREMAL
evaluates the maximum over the AP corner elements only and the minimum over the AP element nearest to each
UE element's projection, which is O(N_UE) instead of O(N_AP N_UE). Both go through the same distance
kernel, and `validate_extremal_mode` compares them.

Functions:
    max_phase_spread: The spread of effective distances at one separation.
    phase_spread_curve: The spread at several separations.
    solve_near_field_distance: The smallest separation with a phase mismatch of at most pi/8.
    validate_extremal_mode: Compare extremal and full pair search.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional

import numpy as np
import torch

from nearfield_boundary.config import ArrayKind, GridPlane, Method, SearchMode, ScenarioConfig
from nearfield_boundary.constants import (
    DEFAULT_CHUNK_PAIRS,
    DEFAULT_REL_TOL,
    EXTREMAL_TOLERANCE_M,
    FULL_MODE_PAIR_LIMIT,
    MAX_REL_TOL,
    SEPARATION_FLOOR_WAVELENGTHS,
    SPREAD_LIMIT_WAVELENGTHS,
)
from nearfield_boundary.errors import InvalidArgumentError, SeparationDomainError
from nearfield_boundary.model.formulas import closed_form_distance
from nearfield_boundary.model.geometry import (
    ElementGrid,
    build_grid,
    rotate_grid,
    scenario_rotation,
)
from nearfield_boundary.model.steering import CompensationVector, upa_compensation
from nearfield_boundary.output import ExtremalCheckReport, NearFieldResult, SpreadResult
from nearfield_boundary.util.reduction import (
    paired_effective_distances,
    pair_effective_distances,
    reduce_pair_extremes,
)
from nearfield_boundary.util.solver import (
    bisect_decreasing,
    check_monotone,
    expand_bracket,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PreparedUE:
    """
    The rotated, compensated UE of a scenario, shared by every separation.

    Attributes:
        grid (ElementGrid): The rotated UE grid.
        compensation (CompensationVector): Compensation per UE element.
        positions (torch.Tensor): (num_ue, 3) float64 positions.
        compensation_t (torch.Tensor): (num_ue,) float64 compensation.
        max_y_m (float): Largest y coordinate of the rotated UE.
    """

    grid: ElementGrid
    compensation: CompensationVector
    positions: torch.Tensor
    compensation_t: torch.Tensor
    max_y_m: float


@lru_cache(maxsize=64)
def prepare_ue(config: ScenarioConfig) -> PreparedUE:
    wavelength = config.wavelength_m
    for role, spec in (("AP", config.ap), ("UE", config.ue)):
        discrepancy = spec.aperture_discrepancy_m(wavelength)
        if abs(discrepancy) > wavelength / 4:
            logger.warning(
                "%s aperture %s m differs from its element span by %s m",
                role,
                spec.aperture_m,
                discrepancy,
            )
    local = build_grid(config.ue, wavelength, (0.0, 0.0, 0.0), GridPlane.UE)
    rotated = rotate_grid(local, scenario_rotation(config))
    compensation = upa_compensation(rotated)
    return PreparedUE(
        grid=rotated,
        compensation=compensation,
        positions=torch.tensor(rotated.positions, dtype=torch.float64),
        compensation_t=torch.tensor(compensation.per_element_m, dtype=torch.float64),
        max_y_m=float(rotated.positions[:, 1].max()),
    )


def _check_separation(prepared: PreparedUE, separation_m: float) -> float:
    separation_m = float(separation_m)
    if not math.isfinite(separation_m):
        raise InvalidArgumentError(f"separation_m must be finite, got {separation_m}")
    if not separation_m > prepared.max_y_m:
        raise SeparationDomainError(
            f"Separation {separation_m} m does not exceed the rotated UE's extent "
            f"{prepared.max_y_m} m towards the AP"
        )
    return separation_m


def _ap_corner_indices(config: ScenarioConfig) -> list[int]:
    n = config.ap.elements_per_axis
    if config.ap.kind is ArrayKind.ULA:
        corners = [0, n - 1]
    else:
        corners = [0, n - 1, (n - 1) * n, n * n - 1]
    return sorted(set(corners))


def _nearest_ap_indices(config: ScenarioConfig, ue: np.ndarray) -> np.ndarray:
    """
    Flat index of the AP element nearest to each UE element's projection onto the AP plane.
    """
    n = config.ap.elements_per_axis
    spacing = config.ap.spacing_m(config.wavelength_m)

    def nearest(coordinate: np.ndarray) -> np.ndarray:
        # halfway points go to the lower index
        index = np.ceil(coordinate / spacing + (n - 1) / 2 - 0.5)
        return np.clip(index, 0, n - 1).astype(np.int64)

    ix = nearest(ue[:, 0])
    if config.ap.kind is ArrayKind.ULA:
        return ix
    return ix * n + nearest(ue[:, 2])


def _first_extreme(
    values: torch.Tensor, flat_index: torch.Tensor, largest: bool
) -> tuple[float, int]:
    # lowest flat index among equal extremes, as in the full search
    extreme = values.max() if largest else values.min()
    index = int(flat_index[values == extreme].min())
    return float(extreme), index


@torch.inference_mode()
def _extremal_spread(
    config: ScenarioConfig, prepared: PreparedUE, ap_grid: ElementGrid
) -> tuple[float, int, float, int]:
    num_ue = len(prepared.grid)
    ue_range = torch.arange(num_ue, dtype=torch.int64)

    corners = torch.tensor(_ap_corner_indices(config), dtype=torch.int64)
    ap = torch.tensor(ap_grid.positions, dtype=torch.float64)
    corner_values = pair_effective_distances(
        ap[corners], prepared.positions, prepared.compensation_t
    )
    corner_flat = corners[:, None] * num_ue + ue_range[None, :]
    max_value, max_index = _first_extreme(
        corner_values.reshape(-1), corner_flat.reshape(-1), largest=True
    )

    nearest = torch.from_numpy(_nearest_ap_indices(config, prepared.grid.positions))
    nearest_values = paired_effective_distances(
        ap[nearest], prepared.positions, prepared.compensation_t
    )
    min_value, min_index = _first_extreme(
        nearest_values, nearest * num_ue + ue_range, largest=False
    )
    return max_value, max_index, min_value, min_index


def max_phase_spread(
    config: ScenarioConfig,
    separation_m: float,
    mode: SearchMode = SearchMode.EXTREMAL,
    workers: Optional[int] = None,
    chunk_pairs: int = DEFAULT_CHUNK_PAIRS,
) -> SpreadResult:
    """
    The maximum spread of effective distances over all AP-UE element pairs at one separation.

    Args:
        config (ScenarioConfig): The scenario.
        separation_m (float): Distance d between the UE center (origin) and the AP center (0, d, 0).
        mode (SearchMode, optional): FULL or EXTREMAL pair search. Defaults to EXTREMAL.
        workers (Optional[int], optional): Threads of the full search. Defaults to None (sequential chunks).
        chunk_pairs (int, optional): Pairs per chunk of the full search. Defaults to DEFAULT_CHUNK_PAIRS.

    Returns:
        SpreadResult: The extremes, their element pairs and the phase spread.

    Raises:
        SeparationDomainError: If d does not exceed the largest y coordinate of the rotated UE.
        InvalidArgumentError: On a non-finite separation.
    """
    mode = SearchMode(mode)
    prepared = prepare_ue(config)
    separation_m = _check_separation(prepared, separation_m)
    ap_grid = build_grid(
        config.ap, config.wavelength_m, (0.0, separation_m, 0.0), GridPlane.AP
    )
    num_ue = len(prepared.grid)
    if mode is SearchMode.FULL:
        extremes = reduce_pair_extremes(
            torch.tensor(ap_grid.positions, dtype=torch.float64),
            prepared.positions,
            prepared.compensation_t,
            chunk_pairs=chunk_pairs,
            workers=workers,
        )
        max_value, max_index = extremes.max_value, extremes.max_index
        min_value, min_index = extremes.min_value, extremes.min_index
    else:
        max_value, max_index, min_value, min_index = _extremal_spread(
            config, prepared, ap_grid
        )
    return SpreadResult.from_extremes(
        separation_m=separation_m,
        wavelength_m=config.wavelength_m,
        max_effective_m=max_value,
        min_effective_m=min_value,
        argmax_pair=divmod(max_index, num_ue),
        argmin_pair=divmod(min_index, num_ue),
        search_mode=mode,
    )


def phase_spread_curve(
    config: ScenarioConfig,
    separations: Iterable[float],
    mode: SearchMode = SearchMode.EXTREMAL,
) -> list[SpreadResult]:
    return [max_phase_spread(config, d, mode) for d in separations]


def _initial_guess(config: ScenarioConfig) -> float:
    try:
        return closed_form_distance(config, Method.APPROX)
    except InvalidArgumentError:
        # point antennas have no closed form
        return config.wavelength_m


def solve_near_field_distance(
    config: ScenarioConfig,
    rel_tol: float = DEFAULT_REL_TOL,
    mode: SearchMode = SearchMode.EXTREMAL,
    workers: Optional[int] = None,
    chunk_pairs: int = DEFAULT_CHUNK_PAIRS,
) -> NearFieldResult:
    """
    The near-field distance: the smallest separation at which the spread of effective distances is at most
    lambda/16.

    The bracket grows geometrically from the closed-form approximation, the spread is sampled for monotonicity
    inside it, and bisection narrows it to rel_tol. The returned distance is the upper end of the final
    interval, so its spread is within the criterion.

    Args:
        config (ScenarioConfig): The scenario.
        rel_tol (float, optional): Relative width of the final interval, in (0, 1e-2]. Defaults to 1e-4.
        mode (SearchMode, optional): The pair search. Defaults to EXTREMAL.
        workers (Optional[int], optional): Threads of the full search.
        chunk_pairs (int, optional): Pairs per chunk of the full search.

    Returns:
        NearFieldResult: The simulated near-field distance with its diagnostics.

    Raises:
        InvalidArgumentError: If rel_tol is outside (0, 1e-2].
        NoConvergenceError: If no bracket is found within 60 expansions.
        NonMonotoneSpreadError: If the spread increases inside the bracket.
    """
    if not (0 < rel_tol <= MAX_REL_TOL):
        raise InvalidArgumentError(
            f"rel_tol must be in (0, {MAX_REL_TOL}], got {rel_tol}"
        )
    mode = SearchMode(mode)
    prepared = prepare_ue(config)
    target = SPREAD_LIMIT_WAVELENGTHS * config.wavelength_m
    floor = prepared.max_y_m + SEPARATION_FLOOR_WAVELENGTHS * config.wavelength_m
    evaluations = 0

    def spread(d: float) -> float:
        nonlocal evaluations
        evaluations += 1
        return max_phase_spread(config, d, mode, workers, chunk_pairs).spread_m

    guess = _initial_guess(config)
    bracket = expand_bracket(spread, target, guess, floor)
    diagnostics = {
        "ap_aperture_nominal_m": config.ap.aperture_m,
        "ap_aperture_effective_m": config.ap_aperture_m,
        "ue_aperture_nominal_m": config.ue.aperture_m,
        "ue_aperture_effective_m": config.ue_aperture_m,
        "ap_elements": config.ap.num_elements,
        "ue_elements": config.ue.num_elements,
        "initial_guess_m": guess,
        "expansions": bracket.expansions,
        "floor_reached": bracket.floor_reached,
    }
    if bracket.floor_reached:
        root, lo, iterations = bracket.hi, bracket.lo, 0
    else:
        check_monotone(spread, bracket)
        bisection = bisect_decreasing(spread, target, bracket.lo, bracket.hi, rel_tol)
        root, lo, iterations = bisection.root, bisection.lo, bisection.iterations
    residual = spread(root) - target
    diagnostics.update(bracket=(lo, root), spread_evaluations=evaluations)
    logger.info(
        "Simulated near-field distance %.6g m after %d iterations (%s search)",
        root,
        iterations,
        mode.value,
    )
    return NearFieldResult(
        d_f_m=root,
        method=Method.SIMULATED,
        iterations=iterations,
        residual_m=residual,
        search_mode=mode,
        diagnostics=diagnostics,
    )


def validate_extremal_mode(
    config: ScenarioConfig, separations: Iterable[float]
) -> ExtremalCheckReport:
    """
    Evaluate the spread with both pair searches at each separation.

    Args:
        config (ScenarioConfig): A scenario with at most 1e6 element pairs.
        separations (Iterable[float]): Separations beyond the rotated UE.

    Returns:
        ExtremalCheckReport: Passes if every discrepancy is within 1e-12 m.

    Raises:
        InvalidArgumentError: If the scenario is too large for the full search or no separation is given.
    """
    if config.num_pairs > FULL_MODE_PAIR_LIMIT:
        raise InvalidArgumentError(
            f"{config.num_pairs} pairs exceed the full-search limit {FULL_MODE_PAIR_LIMIT}"
        )
    separations = [float(d) for d in separations]
    if not separations:
        raise InvalidArgumentError("No separations to validate")
    discrepancies = [
        abs(
            max_phase_spread(config, d, SearchMode.EXTREMAL).spread_m
            - max_phase_spread(config, d, SearchMode.FULL).spread_m
        )
        for d in separations
    ]
    worst = max(discrepancies)
    return ExtremalCheckReport(
        separations=separations,
        discrepancies=discrepancies,
        max_discrepancy_m=worst,
        passed=worst <= EXTREMAL_TOLERANCE_M,
    )
