from nearfield_boundary.config import (
    ArraySpec,
    FrequencyConfig,
    Method,
    RotationAngles,
    Scenario,
    ScenarioConfig,
    ScenarioOptions,
    SearchMode,
    SweepKind,
    SweepSpec,
)
from nearfield_boundary.model.formulas import closed_form_distance
from nearfield_boundary.model.simulator import (
    max_phase_spread,
    phase_spread_curve,
    solve_near_field_distance,
    validate_extremal_mode,
)
from nearfield_boundary.output import NearFieldResult, SpreadResult

__version__ = "0.1.0"
