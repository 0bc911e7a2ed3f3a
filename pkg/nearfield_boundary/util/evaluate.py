"""
This module runs the acceptance matrix that compares the simulator with the closed forms.

Each check returns one or more `ValidationRow`s with a measured value, the expected value and a tolerance.
The reference scenario defaults to D1 = 0.1 m, D2 = 0.05 m and a wavelength of exactly 1 mm, so the closed
forms give 45 m (ULA) and 90 m (UPA). Other apertures and wavelengths move the expected values with them.
The agreement and symmetry checks run at desk scale (D1 = 0.02 m, D2 = 0.01 m at 300 GHz), where the full
pair search stays below 1e6 pairs.

`perturb` scales every closed-form distance the harness computes by (1 + perturb); any nonzero value must make
the matrix fail, which is how the harness itself is tested.

Functions:
    reference_config: The published reference scenario.
    desk_config: The scaled-down scenario used for full pair searches.
    mirror: The same scenario with theta and/or phi negated.
    run_validation: Run every check and collect a ValidationReport.
"""

import logging
import math
from dataclasses import replace
from typing import Callable, Optional

import numpy as np
from tqdm import tqdm

from nearfield_boundary.config import (
    ArraySpec,
    FrequencyConfig,
    Method,
    RotationAngles,
    Scenario,
    ScenarioConfig,
    SearchMode,
)
from nearfield_boundary.constants import (
    DEFAULT_FREQUENCY_HZ,
    EXTREMAL_TOLERANCE_M,
    RELATIVE_AGREEMENT,
    ap_preset_map,
    ue_preset_map,
)
from nearfield_boundary.model.formulas import (
    FormulaInput,
    aligned_ula,
    aligned_upa,
    appendix_error,
    appendix_premises_hold,
    closed_form_distance,
    has_exact_form,
    misalignment_reduction,
    ula_approx,
    upa1_approx,
    upa2_approx,
)
from nearfield_boundary.model.simulator import (
    solve_near_field_distance,
    validate_extremal_mode,
)
from nearfield_boundary.output import ValidationReport, ValidationRow
from nearfield_boundary.util.helpers import relative_difference

logger = logging.getLogger(__name__)

REFERENCE_WAVELENGTH_M = 1e-3
REFERENCE_D1_M = 0.1
REFERENCE_D2_M = 0.05
SYMMETRY_REL_TOL = 1e-4
MACHINE_REL_TOL = 1e-12
REDUCTION_TOL = 0.001
PRESET_TOL = 0.002
DESK_ANGLES = (0.0, math.pi / 6, math.pi / 3, math.pi / 2)
DESK_UPA_ANGLE_PAIRS = ((math.pi / 6, math.pi / 6), (math.pi / 3, math.pi / 5))


def reference_config(
    scenario: Scenario,
    theta_rad: float = 0.0,
    d1_m: float = REFERENCE_D1_M,
    d2_m: float = REFERENCE_D2_M,
    wavelength_m: float = REFERENCE_WAVELENGTH_M,
) -> ScenarioConfig:
    return ScenarioConfig.from_apertures(
        scenario,
        d1_m,
        d2_m,
        FrequencyConfig.from_wavelength(wavelength_m),
        RotationAngles(theta_rad),
    )


def desk_config(
    scenario: Scenario, theta_rad: float = 0.0, phi_rad: float = 0.0
) -> ScenarioConfig:
    return ScenarioConfig.from_apertures(
        scenario,
        0.02,
        0.01,
        FrequencyConfig.from_frequency(DEFAULT_FREQUENCY_HZ),
        RotationAngles(theta_rad, phi_rad),
    )


def mirror(config: ScenarioConfig, theta: bool = True, phi: bool = False) -> ScenarioConfig:
    return replace(config, angles=config.angles.mirrored(theta, phi))


class _Harness:
    def __init__(
        self,
        perturb: float,
        workers: Optional[int],
        seed: int,
        d1_m: float = REFERENCE_D1_M,
        d2_m: float = REFERENCE_D2_M,
        wavelength_m: float = REFERENCE_WAVELENGTH_M,
    ):
        self.scale = 1.0 + perturb
        self.workers = workers
        self.rng = np.random.default_rng(seed)
        self.d1_m = d1_m
        self.d2_m = d2_m
        self.wavelength_m = wavelength_m

    def reference(self, scenario: Scenario, theta_rad: float = 0.0) -> ScenarioConfig:
        return reference_config(
            scenario, theta_rad, self.d1_m, self.d2_m, self.wavelength_m
        )

    def closed_form(self, config: ScenarioConfig, method: Method) -> float:
        return closed_form_distance(config, method) * self.scale

    def best_closed_form(self, config: ScenarioConfig) -> float:
        method = Method.EXACT if has_exact_form(config) else Method.APPROX
        return self.closed_form(config, method)

    def simulated(self, config: ScenarioConfig, mode: SearchMode) -> float:
        return solve_near_field_distance(
            config, mode=mode, workers=self.workers
        ).d_f_m

    def agreement_row(
        self, criterion: str, case: str, measured: float, reference: float
    ) -> ValidationRow:
        difference = relative_difference(measured, reference)
        return ValidationRow(
            criterion,
            case,
            measured,
            reference,
            RELATIVE_AGREEMENT,
            difference <= RELATIVE_AGREEMENT,
            f"relative difference {difference:.3e}",
        )

    def exact_row(
        self, criterion: str, case: str, measured: float, expected: float
    ) -> ValidationRow:
        difference = relative_difference(measured, expected)
        return ValidationRow(
            criterion,
            case,
            measured,
            expected,
            MACHINE_REL_TOL,
            difference <= MACHINE_REL_TOL,
            f"relative difference {difference:.3e}",
        )

    def aligned_baselines(self) -> list[ValidationRow]:
        ula = self.reference(Scenario.ULA_ULA)
        upa = self.reference(Scenario.UPA_UPA)
        apertures = (ula.ap_aperture_m, ula.ue_aperture_m, ula.wavelength_m)
        ula_expected, upa_expected = aligned_ula(*apertures), aligned_upa(*apertures)
        return [
            self.exact_row(
                "aligned", "ula closed form", self.closed_form(ula, Method.EXACT), ula_expected
            ),
            self.exact_row(
                "aligned", "upa closed form", self.closed_form(upa, Method.EXACT), upa_expected
            ),
            self.agreement_row(
                "aligned",
                "ula simulated (full)",
                self.simulated(ula, SearchMode.FULL),
                ula_expected,
            ),
            self.agreement_row(
                "aligned",
                "upa simulated (extremal)",
                self.simulated(upa, SearchMode.EXTREMAL),
                upa_expected,
            ),
        ]

    def misalignment_reductions(self) -> list[ValidationRow]:
        aligned = self.reference(Scenario.ULA_ULA)
        share = aligned.ap_aperture_m / (aligned.ap_aperture_m + aligned.ue_aperture_m)
        # 1 - (D1 / (D1 + D2))^2 for ULAs, half of it for UPAs
        ula_expected = 1 - share**2
        rows = []
        for scenario, formula, expected in (
            (Scenario.ULA_ULA, ula_approx, ula_expected),
            (Scenario.UPA_UPA, upa1_approx, ula_expected / 2),
        ):
            configs = [self.reference(scenario, theta) for theta in (0.0, math.pi / 2)]
            reduction = misalignment_reduction(
                formula(FormulaInput.from_scenario(config)) * self.scale
                for config in configs
            )
            rows.append(
                ValidationRow(
                    "reduction",
                    f"{scenario.value} approx 0 to pi/2",
                    reduction,
                    expected,
                    REDUCTION_TOL,
                    abs(reduction - expected) <= REDUCTION_TOL,
                )
            )
            rotated = configs[1]
            rows.append(
                self.agreement_row(
                    "reduction",
                    f"{scenario.value} simulated at pi/2",
                    self.simulated(rotated, SearchMode.EXTREMAL),
                    self.closed_form(rotated, Method.EXACT),
                )
            )
        return rows

    def preset_variations(self) -> list[ValidationRow]:
        thetas = np.linspace(-math.pi / 2, math.pi / 2, 181)
        frequency = FrequencyConfig.from_frequency(DEFAULT_FREQUENCY_HZ)
        rows = []
        for ap, ue, expected in (
            ("cellular", "tablet", 0.180),
            ("cellular", "smartphone", 0.067),
            ("wifi", "tablet", 0.278),
        ):
            template = ScenarioConfig.from_apertures(
                Scenario.UPA_UPA, ap_preset_map[ap], ue_preset_map[ue], frequency
            )
            variation = misalignment_reduction(
                upa1_approx(FormulaInput.from_scenario(template.with_angles(theta)))
                * self.scale
                for theta in thetas
            )
            rows.append(
                ValidationRow(
                    "presets",
                    f"{ap} + {ue}",
                    variation,
                    expected,
                    PRESET_TOL,
                    abs(variation - expected) <= PRESET_TOL,
                )
            )
        return rows

    def reduction_identities(self) -> list[ValidationRow]:
        config = self.reference(Scenario.UPA_UPA)
        values = FormulaInput.from_scenario(config)
        worst = max(
            relative_difference(
                upa2_approx(FormulaInput(values.d1_m, values.d2_m, values.wavelength_m, theta, 0.0)),
                upa1_approx(FormulaInput(values.d1_m, values.d2_m, values.wavelength_m, theta)),
            )
            for theta in np.linspace(-math.pi / 2, math.pi / 2, 101)
        )
        return [
            ValidationRow(
                "identities", "upa2(theta, 0) = upa1(theta)", worst, 0.0, MACHINE_REL_TOL,
                worst <= MACHINE_REL_TOL,
            ),
            self.exact_row(
                "identities",
                "upa2(0, 0) = aligned upa",
                upa2_approx(values) * self.scale,
                aligned_upa(values.d1_m, values.d2_m, values.wavelength_m),
            ),
        ]

    def desk_agreement(self) -> list[ValidationRow]:
        configs = [
            desk_config(scenario, theta)
            for scenario in (Scenario.ULA_ULA, Scenario.UPA_UPA)
            for theta in DESK_ANGLES
        ] + [desk_config(Scenario.UPA_UPA, theta, phi) for theta, phi in DESK_UPA_ANGLE_PAIRS]
        return [
            self.agreement_row(
                "agreement",
                f"{config.scenario.value} theta={config.angles.theta_rad:.4f} "
                f"phi={config.angles.phi_rad:.4f}",
                self.simulated(config, SearchMode.FULL),
                self.best_closed_form(config),
            )
            for config in configs
        ]

    def _random_small_config(self) -> ScenarioConfig:
        scenario = Scenario.UPA_UPA if self.rng.random() < 0.5 else Scenario.ULA_ULA
        frequency = FrequencyConfig.from_wavelength(REFERENCE_WAVELENGTH_M)
        n_ap, n_ue = (int(n) for n in self.rng.integers(2, 11, size=2))
        theta = float(self.rng.uniform(-math.pi / 2, math.pi / 2))
        phi = (
            float(self.rng.uniform(-math.pi / 2, math.pi / 2))
            if scenario is Scenario.UPA_UPA
            else 0.0
        )

        def spec(n: int) -> ArraySpec:
            return ArraySpec(scenario.array_kind, (n - 1) * REFERENCE_WAVELENGTH_M / 2, n)

        return ScenarioConfig(frequency, spec(n_ap), spec(n_ue), RotationAngles(theta, phi), scenario)

    def extremal_equivalence(self, count: int = 50) -> list[ValidationRow]:
        worst = 0.0
        for _ in range(count):
            config = self._random_small_config()
            # the rotated UE never reaches further than its aperture towards the AP
            separations = config.ue_aperture_m + self.rng.uniform(1e-3, 0.5, size=4)
            worst = max(worst, validate_extremal_mode(config, separations).max_discrepancy_m)
        return [
            ValidationRow(
                "extremal",
                f"{count} random configs",
                worst,
                0.0,
                EXTREMAL_TOLERANCE_M,
                worst <= EXTREMAL_TOLERANCE_M,
            )
        ]

    def _premise_angles(self) -> tuple[float, float]:
        # independent draws, kept once the rotated UE meets the premises of the bound
        while True:
            theta, phi = (float(a) for a in self.rng.uniform(-math.pi / 2, math.pi / 2, size=2))
            if appendix_premises_hold(FormulaInput(1.0, 1.0, 1.0, theta, phi)):
                return theta, phi

    def appendix_bound(self, draws: int = 10_000) -> list[ValidationRow]:
        violations = 0
        worst_ratio = 0.0
        for index in range(draws):
            d1, d2 = self.rng.uniform(0.01, 0.3), self.rng.uniform(0.005, 0.1)
            if index % 2 == 0:
                theta, phi = float(self.rng.uniform(-math.pi / 2, math.pi / 2)), 0.0
            else:
                theta, phi = self._premise_angles()
            values = FormulaInput(d1, d2, REFERENCE_WAVELENGTH_M, theta, phi)
            d = (d1 + d2) * self.rng.uniform(5, 50)
            ue_point = tuple(self.rng.uniform(-d2 / 2, d2 / 2, size=2))
            ap_point = tuple(self.rng.uniform(-d1 / 2, d1 / 2, size=2))
            error = appendix_error(values, d, ue_point, ap_point)
            violations += not error.within_bound
            worst_ratio = max(worst_ratio, error.f_value_m / error.bound_m)
        values = FormulaInput(0.1, 0.05, REFERENCE_WAVELENGTH_M, math.pi / 6)
        ratio = (
            appendix_error(values, 2.0, (0.0, 0.0), (0.0, 0.0)).bound_m
            / appendix_error(values, 1.0, (0.0, 0.0), (0.0, 0.0)).bound_m
        )
        return [
            ValidationRow(
                "appendix",
                f"{draws} draws within bound",
                float(violations),
                0.0,
                0.0,
                violations == 0,
                f"largest f / bound {worst_ratio:.3f}",
            ),
            ValidationRow(
                "appendix", "bound(2d) / bound(d)", ratio, 0.25, 0.0, ratio == 0.25
            ),
        ]

    def symmetry(self) -> list[ValidationRow]:
        families = [
            ("ula theta", lambda a: desk_config(Scenario.ULA_ULA, a), (True, False)),
            ("upa theta", lambda a: desk_config(Scenario.UPA_UPA, a), (True, False)),
            ("upa phi", lambda a: desk_config(Scenario.UPA_UPA, math.pi / 6, a), (False, True)),
        ]
        rows = []
        for name, make, flips in families:
            worst = max(
                relative_difference(
                    self.simulated(mirror(make(angle), *flips), SearchMode.EXTREMAL),
                    self.simulated(make(angle), SearchMode.EXTREMAL),
                )
                for angle in np.linspace(0.0, math.pi / 2, 9)
            )
            rows.append(
                ValidationRow(
                    "symmetry", name, worst, 0.0, SYMMETRY_REL_TOL, worst <= SYMMETRY_REL_TOL
                )
            )
        return rows


def run_validation(
    perturb: float = 0.0,
    workers: Optional[int] = None,
    seed: int = 0,
    random_configs: int = 50,
    appendix_draws: int = 10_000,
    d1_m: float = REFERENCE_D1_M,
    d2_m: float = REFERENCE_D2_M,
    wavelength_m: float = REFERENCE_WAVELENGTH_M,
) -> ValidationReport:
    """
    Run the acceptance matrix.

    Args:
        perturb (float, optional): Relative change applied to every closed-form distance. Defaults to 0.
        workers (Optional[int], optional): Threads of the full pair search. Defaults to None.
        seed (int, optional): Seed of the randomized checks. Defaults to 0.
        random_configs (int, optional): Random scenarios of the extremal equivalence check. Defaults to 50.
        appendix_draws (int, optional): Random draws of the effective-plane error check. Defaults to 10000.
        d1_m (float, optional): AP aperture of the reference rows. Defaults to 0.1.
        d2_m (float, optional): UE aperture of the reference rows. Defaults to 0.05.
        wavelength_m (float, optional): Wavelength of the reference rows. Defaults to 1e-3.

    Returns:
        ValidationReport: One row per check.
    """
    harness = _Harness(perturb, workers, seed, d1_m, d2_m, wavelength_m)
    checks: list[Callable[[], list[ValidationRow]]] = [
        harness.aligned_baselines,
        harness.misalignment_reductions,
        harness.preset_variations,
        harness.reduction_identities,
        harness.desk_agreement,
        lambda: harness.extremal_equivalence(random_configs),
        lambda: harness.appendix_bound(appendix_draws),
        harness.symmetry,
    ]
    report = ValidationReport()
    for check in tqdm(checks, desc="Validating"):
        for row in check():
            report.add(row)
            if not row.passed:
                logger.warning("Failed %s / %s: %s", row.criterion, row.case, row.measured)
    return report
