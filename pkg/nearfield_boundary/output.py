"""
This module defines the result classes returned by the simulator, the solver and the validation harness.

Classes:
    SpreadResult: The maximum effective-distance spread at one separation.
    NearFieldResult: A near-field distance and how it was obtained.
    ExtremalCheckReport: Extremal against full pair search at a set of separations.
    ValidationRow: One row of the acceptance matrix.
    ValidationReport: The rows of the acceptance matrix.
"""

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Optional

import pandas as pd

from nearfield_boundary.config import Method, SearchMode


@dataclass(frozen=True)
class SpreadResult:
    """
    The spread of effective distances over all AP-UE element pairs at one separation.

    Attributes:
        separation_m (float): The AP-UE center distance d.
        max_effective_m (float): The largest effective distance.
        min_effective_m (float): The smallest effective distance.
        spread_m (float): max_effective_m - min_effective_m.
        phase_spread_rad (float): 2 pi spread_m / lambda.
        argmax_pair (tuple[int, int]): (ap_index, ue_index) of the largest effective distance.
        argmin_pair (tuple[int, int]): (ap_index, ue_index) of the smallest effective distance.
        search_mode (SearchMode): The pair search that produced the result.
    """

    separation_m: float
    max_effective_m: float
    min_effective_m: float
    spread_m: float
    phase_spread_rad: float
    argmax_pair: tuple[int, int]
    argmin_pair: tuple[int, int]
    search_mode: SearchMode

    @classmethod
    def from_extremes(
        cls,
        separation_m: float,
        wavelength_m: float,
        max_effective_m: float,
        min_effective_m: float,
        argmax_pair: tuple[int, int],
        argmin_pair: tuple[int, int],
        search_mode: SearchMode,
    ) -> "SpreadResult":
        spread = max(max_effective_m - min_effective_m, 0.0)
        return cls(
            separation_m=separation_m,
            max_effective_m=max_effective_m,
            min_effective_m=min_effective_m,
            spread_m=spread,
            phase_spread_rad=2 * math.pi * spread / wavelength_m,
            argmax_pair=argmax_pair,
            argmin_pair=argmin_pair,
            search_mode=search_mode,
        )


@dataclass(frozen=True)
class NearFieldResult:
    """
    A near-field (Fraunhofer) distance.

    Attributes:
        d_f_m (float): The near-field distance in meters.
        method (Method): SIMULATED, EXACT or APPROX.
        iterations (int): Bisection steps, 0 for closed forms.
        residual_m (float): spread(d_f) - lambda/16 for the simulated method, 0 for closed forms.
        search_mode (Optional[SearchMode]): The pair search of the simulated method.
        diagnostics (dict[str, Any]): Apertures, element counts, the final bracket and the number of spread
            evaluations of the simulated method.
    """

    d_f_m: float
    method: Method
    iterations: int = 0
    residual_m: float = 0.0
    search_mode: Optional[SearchMode] = None
    diagnostics: dict[str, Any] = field(default_factory=dict)

    def as_row(self) -> dict[str, Any]:
        return {
            "method": self.method.value,
            "d_f_m": self.d_f_m,
            "iterations": self.iterations,
            "residual_m": self.residual_m,
            "search_mode": self.search_mode.value if self.search_mode else "",
        }


@dataclass(frozen=True)
class ExtremalCheckReport:
    """
    Attributes:
        separations (list[float]): The separations that were checked.
        discrepancies (list[float]): |spread_extremal - spread_full| per separation.
        max_discrepancy_m (float): The largest discrepancy.
        passed (bool): Whether max_discrepancy_m is within tolerance.
    """

    separations: list[float]
    discrepancies: list[float]
    max_discrepancy_m: float
    passed: bool


@dataclass
class ValidationRow:
    criterion: str
    case: str
    measured: float
    expected: float
    tolerance: float
    passed: bool
    note: str = ""


@dataclass
class ValidationReport:
    rows: list[ValidationRow] = field(default_factory=list)

    def add(self, row: ValidationRow):
        self.rows.append(row)

    @property
    def passed(self) -> bool:
        return bool(self.rows) and all(row.passed for row in self.rows)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(row) for row in self.rows])
