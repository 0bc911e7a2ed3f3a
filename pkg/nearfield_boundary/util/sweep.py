"""
This module evaluates figure-reproduction sweeps into pandas DataFrames and writes them as CSV.

Each sweep kind maps to a builder in `sweep_builder_map`. Rows are ordered by the outer sweep variable,
ascending, and methods appear as columns in the order sim, exact, approx. Values that do not exist for a grid
point (the exact form of a UPA rotated in two planes) are left blank.

Functions:
    default_axes: The default axis ranges of a sweep kind.
    evaluate_methods: Near-field distance of one scenario by every requested method.
    spread_vs_d: Maximum phase mismatch versus separation.
    df_vs_d2: Near-field distance versus UE aperture.
    df_vs_theta: Near-field distance versus rotation theta.
    heatmap_theta_phi: Approximate near-field distance over (theta, phi).
    run_sweep: Evaluate a SweepSpec and write its CSV.
    write_csv: Deterministic CSV writer.
"""

import logging
import math
import warnings
from typing import Callable, Optional

import numpy as np
import pandas as pd
from tqdm.contrib.concurrent import thread_map

from nearfield_boundary.config import (
    AxisRange,
    Method,
    Scenario,
    ScenarioConfig,
    SearchMode,
    SweepKind,
    SweepSpec,
)
from nearfield_boundary.constants import CSV_FLOAT_FORMAT, DEFAULT_REL_TOL
from nearfield_boundary.errors import FormulaUnavailableError, InvalidArgumentError
from nearfield_boundary.model.formulas import (
    FormulaInput,
    closed_form_distance,
    closed_form_phase_spread,
    has_exact_form,
)
from nearfield_boundary.model.simulator import max_phase_spread, solve_near_field_distance

logger = logging.getLogger(__name__)

METHOD_ORDER = (Method.SIMULATED, Method.EXACT, Method.APPROX)


def default_axes(kind: SweepKind) -> dict[str, AxisRange]:
    """
    Default ranges. The UE aperture range [0.005, 0.05] m is a convention, not a published setting.
    """
    half_pi = math.pi / 2
    return {
        SweepKind.SPREAD_VS_D: {"d": AxisRange(5.0, 200.0, 40)},
        SweepKind.DF_VS_D2: {"d2": AxisRange(0.005, 0.05, 10)},
        SweepKind.DF_VS_THETA: {"theta": AxisRange(-half_pi, half_pi, 181)},
        SweepKind.HEATMAP_THETA_PHI: {
            "theta": AxisRange(-half_pi, half_pi, 37),
            "phi": AxisRange(-half_pi, half_pi, 37),
        },
        SweepKind.VALIDATE: {},
    }[SweepKind(kind)]


def _ordered(methods) -> list[Method]:
    return [method for method in METHOD_ORDER if method in set(methods)]


def evaluate_methods(
    config: ScenarioConfig,
    methods,
    mode: SearchMode = SearchMode.EXTREMAL,
    rel_tol: float = DEFAULT_REL_TOL,
) -> dict[Method, Optional[float]]:
    """
    Near-field distance of one scenario by every requested method.

    Returns:
        dict[Method, Optional[float]]: Distances in meters; None where the closed form does not exist.
    """
    distances = {}
    for method in _ordered(methods):
        if method is Method.SIMULATED:
            distances[method] = solve_near_field_distance(config, rel_tol, mode).d_f_m
        elif method is Method.EXACT and not has_exact_form(config):
            distances[method] = None
        else:
            distances[method] = closed_form_distance(config, method)
    return distances


def _df_columns(distances: dict[Method, Optional[float]]) -> dict[str, float]:
    return {
        f"d_f_{method.value}_m": np.nan if value is None else value
        for method, value in distances.items()
    }


def _map(func: Callable, items: list, desc: str, workers: Optional[int]) -> list:
    return thread_map(func, items, max_workers=max(1, workers or 1), desc=desc)


def _warn_missing_exact(spec: SweepSpec, configs: list[ScenarioConfig]):
    if Method.EXACT in spec.methods and not all(map(has_exact_form, configs)):
        warnings.warn(
            "No exact closed form for UPA rotations in two planes; those cells are left blank",
            UserWarning,
        )


def spread_vs_d(spec: SweepSpec, workers: Optional[int] = None) -> pd.DataFrame:
    """
    The maximum phase mismatch versus separation, simulated and predicted by the closed forms.
    """
    config = spec.scenario
    values = FormulaInput.from_scenario(config)
    exact_offset = values.d2_m / 2 * abs(math.sin(values.theta_rad))
    closed_forms = {}
    for method in _ordered(spec.methods):
        if method is Method.SIMULATED:
            continue
        try:
            closed_forms[method] = closed_form_distance(config, method)
        except FormulaUnavailableError:
            _warn_missing_exact(spec, [config])
            closed_forms[method] = None

    def row(d: float) -> dict[str, float]:
        result = {"d_m": d}
        for method in _ordered(spec.methods):
            column = f"phase_spread_{method.value}_rad"
            if method is Method.SIMULATED:
                result[column] = max_phase_spread(config, d, spec.mode).phase_spread_rad
            elif closed_forms[method] is None:
                result[column] = np.nan
            else:
                offset = exact_offset if method is Method.EXACT else 0.0
                result[column] = closed_form_phase_spread(
                    d, closed_forms[method], offset
                )
        return result

    separations = [float(d) for d in spec.axes["d"].values()]
    return pd.DataFrame(_map(row, separations, "Spread vs d", workers))


def df_vs_d2(spec: SweepSpec, workers: Optional[int] = None) -> pd.DataFrame:
    configs = [
        spec.scenario.with_ue_aperture(float(d2)) for d2 in spec.axes["d2"].values()
    ]
    _warn_missing_exact(spec, configs)

    def row(config: ScenarioConfig) -> dict[str, float]:
        distances = evaluate_methods(config, spec.methods, spec.mode, spec.rel_tol)
        return {
            "d2_m": config.ue.aperture_m,
            "d2_effective_m": config.ue_aperture_m,
            **_df_columns(distances),
        }

    return pd.DataFrame(_map(row, configs, "d_F vs D2", workers))


def df_vs_theta(spec: SweepSpec, workers: Optional[int] = None) -> pd.DataFrame:
    phi = spec.scenario.angles.phi_rad
    configs = [
        spec.scenario.with_angles(float(theta), phi)
        for theta in spec.axes["theta"].values()
    ]
    _warn_missing_exact(spec, configs)

    def row(config: ScenarioConfig) -> dict[str, float]:
        distances = evaluate_methods(config, spec.methods, spec.mode, spec.rel_tol)
        return {"theta_rad": config.angles.theta_rad, **_df_columns(distances)}

    return pd.DataFrame(_map(row, configs, "d_F vs theta", workers))


def heatmap_theta_phi(spec: SweepSpec, workers: Optional[int] = None) -> pd.DataFrame:
    """
    (theta, phi, d_F) triples, theta outer and phi inner, both ascending.

    Raises:
        InvalidArgumentError: For the ULA scenario, which has no phi rotation.
    """
    if spec.scenario.scenario is not Scenario.UPA_UPA:
        raise InvalidArgumentError("The (theta, phi) heatmap needs the UPA scenario")
    configs = [
        spec.scenario.with_angles(float(theta), float(phi))
        for theta in spec.axes["theta"].values()
        for phi in spec.axes["phi"].values()
    ]
    _warn_missing_exact(spec, configs)

    def row(config: ScenarioConfig) -> dict[str, float]:
        distances = evaluate_methods(config, spec.methods, spec.mode, spec.rel_tol)
        return {
            "theta_rad": config.angles.theta_rad,
            "phi_rad": config.angles.phi_rad,
            **_df_columns(distances),
        }

    return pd.DataFrame(_map(row, configs, "Heatmap", workers))


sweep_builder_map: dict[SweepKind, Callable[..., pd.DataFrame]] = {
    SweepKind.SPREAD_VS_D: spread_vs_d,
    SweepKind.DF_VS_D2: df_vs_d2,
    SweepKind.DF_VS_THETA: df_vs_theta,
    SweepKind.HEATMAP_THETA_PHI: heatmap_theta_phi,
}


def write_csv(frame: pd.DataFrame, path: str):
    """
    Writes comma-separated UTF-8 with LF line endings, blanks for missing values and 9 significant digits.
    """
    frame.to_csv(
        path,
        index=False,
        float_format=CSV_FLOAT_FORMAT,
        na_rep="",
        lineterminator="\n",
        encoding="utf-8",
    )
    logger.info("Wrote %d rows to %s", len(frame), path)


def run_sweep(spec: SweepSpec, workers: Optional[int] = None) -> pd.DataFrame:
    """
    Evaluates a sweep and writes its CSV to spec.output_path if given.

    Args:
        spec (SweepSpec): The sweep.
        workers (Optional[int], optional): Grid points evaluated concurrently. Defaults to None (sequential).

    Returns:
        pd.DataFrame: One row per grid point.

    Raises:
        InvalidArgumentError: For SweepKind.VALIDATE, which is run by `util.evaluate.run_validation`.
    """
    if spec.sweep_kind not in sweep_builder_map:
        raise InvalidArgumentError(
            f"Sweep kind {spec.sweep_kind.value} has no table builder"
        )
    frame = sweep_builder_map[spec.sweep_kind](spec, workers)
    if spec.output_path is not None:
        write_csv(frame, spec.output_path)
    return frame
