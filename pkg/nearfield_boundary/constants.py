"""
This module defines the physical constants, numerical defaults and lookup maps used across the package.

It includes `ap_preset_map` and `ue_preset_map`, dictionaries that map device names to physical aperture sizes
in meters, and the defaults of the near-field solver and of the CSV writer.
Add an entry to the preset maps to make a new device available to the command line flags
`--preset-ap` and `--preset-ue`.
"""

from math import pi

from scipy.constants import c as SPEED_OF_LIGHT

# Fraunhofer criterion: phase mismatch pi/8, i.e. an effective-distance spread of lambda/16
PHASE_MISMATCH_LIMIT_RAD = pi / 8
SPREAD_LIMIT_WAVELENGTHS = 1.0 / 16.0

ANGLE_LIMIT_RAD = pi / 2
# Inputs such as 1.5708 are treated as pi/2
ANGLE_CLAMP_TOLERANCE_RAD = 1e-4

DEFAULT_FREQUENCY_HZ = 300e9
DEFAULT_REL_TOL = 1e-4
MAX_REL_TOL = 1e-2
BRACKET_EXPANSION_FACTOR = 2.0
MAX_BRACKET_EXPANSIONS = 60
MONOTONE_CHECK_SAMPLES = 8
# Smallest separation the solver tries, in wavelengths beyond the rotated UE
SEPARATION_FLOOR_WAVELENGTHS = 1e-3

# Pairs evaluated per chunk of the full search (~100 MB of float64 temporaries)
DEFAULT_CHUNK_PAIRS = 1 << 22
FULL_MODE_PAIR_LIMIT = 10**6
EXTREMAL_TOLERANCE_M = 1e-12
RELATIVE_AGREEMENT = 0.02

# 9 significant digits
CSV_FLOAT_FORMAT = "%.8e"

ap_preset_map = {"cellular": 0.20, "wifi": 0.10}
ue_preset_map = {"tablet": 0.05, "smartphone": 0.015, "vr": 0.008}
