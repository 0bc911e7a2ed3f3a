"""
This module defines the configuration classes for array scenarios, sweeps and the command line.

It includes the value types describing a scenario (`FrequencyConfig`, `ArraySpec`, `RotationAngles`,
`ScenarioConfig`), the sweep description `SweepSpec`, and `ScenarioOptions`, which merges defaults,
config-file values and command line flags into a `ScenarioConfig`.

Classes:
    ArrayKind, Scenario, GridPlane, Frame, Method, SearchMode, SweepKind: String enums.
    FrequencyConfig: Carrier frequency and wavelength.
    ArraySpec: Aperture, element count and kind of one antenna array.
    RotationAngles: The (theta, phi) misalignment of the UE.
    ScenarioConfig: A complete AP/UE scenario.
    DevicePreset: A named device aperture.
    AxisRange: A linearly spaced sweep axis.
    SweepSpec: A figure-reproduction sweep.
    ScenarioOptions: The flag-level description of a scenario, as used by the command line.

Functions:
    check_angle: Validate (and clamp within tolerance) a misalignment angle.
    parse_config_text: Parse key=value config text into a dictionary.
    parse_config_file: Parse a key=value config file into a dictionary.
"""

import math
from dataclasses import asdict, dataclass, field, fields, replace
from enum import Enum
from typing import Any, Optional

import numpy as np

from nearfield_boundary.constants import (
    ANGLE_CLAMP_TOLERANCE_RAD,
    ANGLE_LIMIT_RAD,
    DEFAULT_FREQUENCY_HZ,
    DEFAULT_REL_TOL,
    SPEED_OF_LIGHT,
    ap_preset_map,
    ue_preset_map,
)
from nearfield_boundary.errors import InvalidArgumentError


class ArrayKind(str, Enum):
    ULA = "ula"
    UPA = "upa"


class Scenario(str, Enum):
    ULA_ULA = "ula"
    UPA_UPA = "upa"

    @property
    def array_kind(self) -> ArrayKind:
        return ArrayKind.ULA if self is Scenario.ULA_ULA else ArrayKind.UPA


class GridPlane(str, Enum):
    UE = "xz_plane_ue"
    AP = "xz_plane_ap"


class Frame(str, Enum):
    UE_LOCAL = "ue_local"
    GLOBAL = "global"


class Method(str, Enum):
    SIMULATED = "sim"
    EXACT = "exact"
    APPROX = "approx"


class SearchMode(str, Enum):
    FULL = "full"
    EXTREMAL = "extremal"


class SweepKind(str, Enum):
    SPREAD_VS_D = "spread-vs-d"
    DF_VS_D2 = "df-vs-d2"
    DF_VS_THETA = "df-vs-theta"
    HEATMAP_THETA_PHI = "heatmap"
    VALIDATE = "validate"


def _parse_enum(enum_class, value, name: str):
    if isinstance(value, enum_class):
        return value
    try:
        return enum_class(str(value).lower())
    except ValueError:
        options = ", ".join(member.value for member in enum_class)
        raise InvalidArgumentError(
            f"Invalid {name} {value!r}. Options are: {options}"
        ) from None


def check_angle(value: float, name: str) -> float:
    """
    Validate a misalignment angle.

    Angles within `ANGLE_CLAMP_TOLERANCE_RAD` outside [-pi/2, pi/2] are clamped to the edge of the range.

    Args:
        value (float): The angle in radians.
        name (str): The name used in the error message.

    Returns:
        float: The validated angle.

    Raises:
        InvalidArgumentError: If the angle is not finite or is outside the range.
    """
    value = float(value)
    if not math.isfinite(value):
        raise InvalidArgumentError(f"{name} must be finite, got {value}")
    if abs(value) > ANGLE_LIMIT_RAD:
        if abs(value) - ANGLE_LIMIT_RAD > ANGLE_CLAMP_TOLERANCE_RAD:
            raise InvalidArgumentError(
                f"{name}={value} rad is outside [-pi/2, pi/2]"
            )
        value = math.copysign(ANGLE_LIMIT_RAD, value)
    return value


@dataclass(frozen=True)
class FrequencyConfig:
    """
    Carrier frequency and the wavelength derived from it.

    Attributes:
        frequency_hz (float): The carrier frequency in Hz.
        wavelength_m (float): The wavelength c/f in meters.
    """

    frequency_hz: float
    wavelength_m: float

    def __post_init__(self):
        if not (math.isfinite(self.frequency_hz) and self.frequency_hz > 0):
            raise InvalidArgumentError(
                f"frequency_hz must be positive, got {self.frequency_hz}"
            )
        if not (math.isfinite(self.wavelength_m) and self.wavelength_m > 0):
            raise InvalidArgumentError(
                f"wavelength_m must be positive, got {self.wavelength_m}"
            )
        if abs(self.frequency_hz * self.wavelength_m - SPEED_OF_LIGHT) > (
            1e-12 * SPEED_OF_LIGHT
        ):
            raise InvalidArgumentError(
                f"wavelength {self.wavelength_m} m does not match frequency {self.frequency_hz} Hz"
            )

    @classmethod
    def from_frequency(cls, frequency_hz: float) -> "FrequencyConfig":
        frequency_hz = float(frequency_hz)
        if not frequency_hz > 0:
            raise InvalidArgumentError(
                f"frequency_hz must be positive, got {frequency_hz}"
            )
        return cls(frequency_hz, SPEED_OF_LIGHT / frequency_hz)

    @classmethod
    def from_wavelength(cls, wavelength_m: float) -> "FrequencyConfig":
        wavelength_m = float(wavelength_m)
        if not wavelength_m > 0:
            raise InvalidArgumentError(
                f"wavelength_m must be positive, got {wavelength_m}"
            )
        return cls(SPEED_OF_LIGHT / wavelength_m, wavelength_m)


@dataclass(frozen=True)
class ArraySpec:
    """
    One antenna array with half-wavelength element spacing.

    Element positions span (elements_per_axis - 1) * lambda / 2 along every occupied axis, so the effective
    aperture used by both the simulator and the closed forms can differ from the nominal `aperture_m`
    by up to a quarter wavelength.

    Attributes:
        kind (ArrayKind): Linear (ULA) or square planar (UPA) array.
        aperture_m (float): The nominal physical size D in meters.
        elements_per_axis (int): N, the number of elements along each occupied axis.
    """

    kind: ArrayKind
    aperture_m: float
    elements_per_axis: int

    def __post_init__(self):
        object.__setattr__(self, "kind", _parse_enum(ArrayKind, self.kind, "kind"))
        if not (math.isfinite(self.aperture_m) and self.aperture_m > 0):
            raise InvalidArgumentError(
                f"aperture_m must be positive, got {self.aperture_m}"
            )
        if int(self.elements_per_axis) != self.elements_per_axis or (
            self.elements_per_axis < 1
        ):
            raise InvalidArgumentError(
                f"elements_per_axis must be a positive integer, got {self.elements_per_axis}"
            )
        object.__setattr__(self, "elements_per_axis", int(self.elements_per_axis))

    @classmethod
    def from_aperture(
        cls, kind: ArrayKind, aperture_m: float, wavelength_m: float
    ) -> "ArraySpec":
        """
        Creates an array spec from a physical size, deriving N = round(2D / lambda) + 1.

        Args:
            kind (ArrayKind): The array kind.
            aperture_m (float): The physical aperture D in meters.
            wavelength_m (float): The wavelength in meters.

        Returns:
            ArraySpec: The array spec.
        """
        if not wavelength_m > 0:
            raise InvalidArgumentError(
                f"wavelength_m must be positive, got {wavelength_m}"
            )
        if not aperture_m > 0:
            raise InvalidArgumentError(f"aperture_m must be positive, got {aperture_m}")
        return cls(kind, float(aperture_m), round(2 * aperture_m / wavelength_m) + 1)

    @property
    def num_elements(self) -> int:
        if self.kind is ArrayKind.ULA:
            return self.elements_per_axis
        return self.elements_per_axis**2

    @staticmethod
    def spacing_m(wavelength_m: float) -> float:
        return wavelength_m / 2

    def effective_aperture_m(self, wavelength_m: float) -> float:
        return (self.elements_per_axis - 1) * wavelength_m / 2

    def aperture_discrepancy_m(self, wavelength_m: float) -> float:
        return self.effective_aperture_m(wavelength_m) - self.aperture_m


@dataclass(frozen=True)
class RotationAngles:
    """
    The UE misalignment: a rotation by theta around the x-axis followed by phi around the z-axis.

    Attributes:
        theta_rad (float): Rotation around the x-axis, in [-pi/2, pi/2].
        phi_rad (float): Rotation around the z-axis, in [-pi/2, pi/2].
    """

    theta_rad: float = 0.0
    phi_rad: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta_rad", check_angle(self.theta_rad, "theta"))
        object.__setattr__(self, "phi_rad", check_angle(self.phi_rad, "phi"))

    @classmethod
    def from_degrees(cls, theta_deg: float, phi_deg: float = 0.0) -> "RotationAngles":
        return cls(math.radians(theta_deg), math.radians(phi_deg))

    def mirrored(self, theta: bool = True, phi: bool = False) -> "RotationAngles":
        return RotationAngles(
            -self.theta_rad if theta else self.theta_rad,
            -self.phi_rad if phi else self.phi_rad,
        )


@dataclass(frozen=True)
class ScenarioConfig:
    """
    A complete AP/UE scenario.

    Attributes:
        frequency (FrequencyConfig): Carrier frequency and wavelength.
        ap (ArraySpec): The access point array, centered on the y-axis.
        ue (ArraySpec): The user equipment array, centered at the origin.
        angles (RotationAngles): The UE misalignment. For ULA_ULA only theta is used and phi must be 0.
        scenario (Scenario): ULA_ULA or UPA_UPA.
    """

    frequency: FrequencyConfig
    ap: ArraySpec
    ue: ArraySpec
    angles: RotationAngles = field(default_factory=RotationAngles)
    scenario: Scenario = Scenario.UPA_UPA

    def __post_init__(self):
        scenario = _parse_enum(Scenario, self.scenario, "scenario")
        object.__setattr__(self, "scenario", scenario)
        if self.ap.kind is not scenario.array_kind or (
            self.ue.kind is not scenario.array_kind
        ):
            raise InvalidArgumentError(
                f"Scenario {scenario.value} needs two {scenario.array_kind.value} arrays, "
                f"got AP {self.ap.kind.value} and UE {self.ue.kind.value}"
            )
        if scenario is Scenario.ULA_ULA and self.angles.phi_rad != 0:
            raise InvalidArgumentError(
                f"The ULA scenario rotates by theta only, got phi={self.angles.phi_rad}"
            )

    @classmethod
    def from_apertures(
        cls,
        scenario: Scenario,
        d1_m: float,
        d2_m: float,
        frequency: FrequencyConfig,
        angles: Optional[RotationAngles] = None,
    ) -> "ScenarioConfig":
        """
        Creates a scenario from the physical AP and UE sizes.

        Args:
            scenario (Scenario): ULA_ULA or UPA_UPA.
            d1_m (float): AP aperture D1 in meters.
            d2_m (float): UE aperture D2 in meters.
            frequency (FrequencyConfig): Carrier frequency.
            angles (Optional[RotationAngles]): UE misalignment. Defaults to aligned.

        Returns:
            ScenarioConfig: The scenario.
        """
        scenario = _parse_enum(Scenario, scenario, "scenario")
        kind = scenario.array_kind
        return cls(
            frequency=frequency,
            ap=ArraySpec.from_aperture(kind, d1_m, frequency.wavelength_m),
            ue=ArraySpec.from_aperture(kind, d2_m, frequency.wavelength_m),
            angles=angles if angles is not None else RotationAngles(),
            scenario=scenario,
        )

    @property
    def wavelength_m(self) -> float:
        return self.frequency.wavelength_m

    @property
    def ap_aperture_m(self) -> float:
        return self.ap.effective_aperture_m(self.wavelength_m)

    @property
    def ue_aperture_m(self) -> float:
        return self.ue.effective_aperture_m(self.wavelength_m)

    @property
    def num_pairs(self) -> int:
        return self.ap.num_elements * self.ue.num_elements

    def with_angles(self, theta_rad: float, phi_rad: float = 0.0) -> "ScenarioConfig":
        return replace(self, angles=RotationAngles(theta_rad, phi_rad))

    def with_ue_aperture(self, d2_m: float) -> "ScenarioConfig":
        return replace(
            self,
            ue=ArraySpec.from_aperture(self.ue.kind, d2_m, self.wavelength_m),
        )


@dataclass(frozen=True)
class DevicePreset:
    """
    A named device aperture.

    Attributes:
        name (str): The device name.
        aperture_m (float): The physical aperture in meters.
    """

    name: str
    aperture_m: float

    def __post_init__(self):
        if not self.aperture_m > 0:
            raise InvalidArgumentError(
                f"Preset {self.name} needs a positive aperture, got {self.aperture_m}"
            )

    @classmethod
    def lookup(cls, name: str, role: str) -> "DevicePreset":
        """
        Looks up an AP ("ap") or UE ("ue") preset by name in the preset maps.
        """
        preset_map = ap_preset_map if role == "ap" else ue_preset_map
        if name not in preset_map:
            raise InvalidArgumentError(
                f"Unknown {role} preset {name!r}. Options are: {', '.join(preset_map)}"
            )
        return cls(name, preset_map[name])


@dataclass(frozen=True)
class AxisRange:
    """
    A linearly spaced sweep axis, both ends included.
    """

    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.count < 2:
            raise InvalidArgumentError(f"Axis needs count >= 2, got {self.count}")
        if not self.start < self.stop:
            raise InvalidArgumentError(
                f"Axis needs start < stop, got [{self.start}, {self.stop}]"
            )

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, int(self.count))


@dataclass
class SweepSpec:
    """
    A figure-reproduction sweep.

    Attributes:
        sweep_kind (SweepKind): Which quantity is swept.
        scenario (ScenarioConfig): The template scenario; swept variables replace its fields.
        axes (dict[str, AxisRange]): Ranges by swept variable: "d" (m), "d2" (m), "theta" and "phi" (rad).
        output_path (Optional[str]): Where the CSV is written. None only returns the table.
        methods (frozenset[Method]): The methods evaluated per grid point.
        mode (SearchMode): Search mode of the simulated method.
        rel_tol (float): Solver tolerance of the simulated method.
    """

    sweep_kind: SweepKind
    scenario: ScenarioConfig
    axes: dict[str, AxisRange]
    output_path: Optional[str] = None
    methods: frozenset[Method] = frozenset(Method)
    mode: SearchMode = SearchMode.EXTREMAL
    rel_tol: float = DEFAULT_REL_TOL

    required_axes = {
        SweepKind.SPREAD_VS_D: ("d",),
        SweepKind.DF_VS_D2: ("d2",),
        SweepKind.DF_VS_THETA: ("theta",),
        SweepKind.HEATMAP_THETA_PHI: ("theta", "phi"),
        SweepKind.VALIDATE: (),
    }

    def __post_init__(self):
        self.sweep_kind = _parse_enum(SweepKind, self.sweep_kind, "sweep kind")
        self.mode = _parse_enum(SearchMode, self.mode, "mode")
        self.methods = frozenset(
            _parse_enum(Method, method, "method") for method in self.methods
        )
        if not self.methods:
            raise InvalidArgumentError("A sweep needs at least one method")
        missing = [
            name for name in self.required_axes[self.sweep_kind] if name not in self.axes
        ]
        if missing:
            raise InvalidArgumentError(
                f"Sweep {self.sweep_kind.value} is missing axes {missing}"
            )


def _parse_value(text: str) -> Any:
    text = text.strip()
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    if text.lower() in ("none", ""):
        return None
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text.strip("'\"")


def parse_config_text(text: str) -> dict[str, Any]:
    """
    Parse key=value lines. Blank lines and lines starting with # are ignored.

    Args:
        text (str): The config text.

    Returns:
        dict[str, Any]: The values by key, with hyphens in keys replaced by underscores.

    Raises:
        InvalidArgumentError: If a line has no "=".
    """
    values = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InvalidArgumentError(f"Config line {number} is not key=value: {line!r}")
        key, value = line.split("=", 1)
        values[key.strip().lstrip("-").replace("-", "_")] = _parse_value(value)
    return values


def parse_config_file(path: str) -> dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        return parse_config_text(f.read())


@dataclass
class ScenarioOptions:
    """
    The flag-level description of a scenario.

    Every field is a command line flag (`--rel-tol` maps to `rel_tol`) and a config-file key.

    Attributes:
        scenario (str): "ula" or "upa". Default is "upa".
        d1 (float): AP aperture in meters. Default is 0.1.
        d2 (float): UE aperture in meters. Default is 0.05.
        freq (Optional[float]): Frequency in Hz. Defaults to 300 GHz unless wavelength is given.
        wavelength (Optional[float]): Wavelength in meters, alternative to freq.
        theta (float): Rotation around the x-axis. Default is 0.
        phi (float): Rotation around the z-axis. Default is 0.
        degrees (bool): Whether theta and phi are given in degrees. Default is False.
        method (str): "sim", "exact", "approx" or "all". Default is "all".
        mode (str): "full" or "extremal" pair search for the simulator. Default is "extremal".
        rel_tol (float): Relative tolerance of the near-field solver. Default is 1e-4.
        out (Optional[str]): Output path for CSV files.
        preset_ap (Optional[str]): AP device preset, overrides d1.
        preset_ue (Optional[str]): UE device preset, overrides d2.
    """

    scenario: str = "upa"
    d1: float = 0.1
    d2: float = 0.05
    freq: Optional[float] = None
    wavelength: Optional[float] = None
    theta: float = 0.0
    phi: float = 0.0
    degrees: bool = False
    method: str = "all"
    mode: str = "extremal"
    rel_tol: float = DEFAULT_REL_TOL
    out: Optional[str] = None
    preset_ap: Optional[str] = None
    preset_ue: Optional[str] = None

    def __post_init__(self):
        if self.freq is not None and self.wavelength is not None:
            raise InvalidArgumentError("Give either freq or wavelength, not both")
        if self.preset_ap is not None:
            self.d1 = DevicePreset.lookup(self.preset_ap, "ap").aperture_m
        if self.preset_ue is not None:
            self.d2 = DevicePreset.lookup(self.preset_ue, "ue").aperture_m
        if self.method != "all":
            _parse_enum(Method, self.method, "method")
        _parse_enum(Scenario, self.scenario, "scenario")
        _parse_enum(SearchMode, self.mode, "mode")

    @classmethod
    def keys(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    @classmethod
    def from_sources(
        cls, config_path: Optional[str] = None, **flags
    ) -> "ScenarioOptions":
        """
        Merges defaults, a config file and flags, in increasing precedence.

        Args:
            config_path (Optional[str]): A key=value config file.
            **flags: Flag values; None means "not given".

        Returns:
            ScenarioOptions: The merged options.

        Raises:
            InvalidArgumentError: On unknown keys or invalid values.
        """
        values = parse_config_file(config_path) if config_path is not None else {}
        values.update(
            {
                key.replace("-", "_"): value
                for key, value in flags.items()
                if value is not None
            }
        )
        unknown = sorted(set(values) - set(cls.keys()))
        if unknown:
            raise InvalidArgumentError(f"Unknown options: {', '.join(unknown)}")
        return cls(**values)

    def frequency_config(self) -> FrequencyConfig:
        if self.wavelength is not None:
            return FrequencyConfig.from_wavelength(self.wavelength)
        return FrequencyConfig.from_frequency(
            self.freq if self.freq is not None else DEFAULT_FREQUENCY_HZ
        )

    def rotation(self) -> RotationAngles:
        if self.degrees:
            return RotationAngles.from_degrees(self.theta, self.phi)
        return RotationAngles(self.theta, self.phi)

    def to_scenario(self) -> ScenarioConfig:
        return ScenarioConfig.from_apertures(
            Scenario(self.scenario.lower()),
            float(self.d1),
            float(self.d2),
            self.frequency_config(),
            self.rotation(),
        )

    def methods(self) -> list[Method]:
        if self.method == "all":
            return list(Method)
        return [_parse_enum(Method, self.method, "method")]

    def search_mode(self) -> SearchMode:
        return _parse_enum(SearchMode, self.mode, "mode")

    def dump(self) -> str:
        """
        Serializes the resolved options as key=value lines. Angles are written in radians and presets are
        resolved into apertures, so parsing the output gives an identical `ScenarioConfig`.
        """
        angles = self.rotation()
        values = asdict(self)
        values.update(
            theta=angles.theta_rad,
            phi=angles.phi_rad,
            degrees=False,
            preset_ap=None,
            preset_ue=None,
        )
        if values["wavelength"] is None and values["freq"] is None:
            values["freq"] = DEFAULT_FREQUENCY_HZ
        lines = [
            f"{key}={value!r}" if isinstance(value, float) else f"{key}={value}"
            for key, value in values.items()
            if value is not None
        ]
        return "\n".join(lines) + "\n"
