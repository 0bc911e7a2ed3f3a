import math

import numpy as np
import pytest
from fire import Fire
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from nearfield_boundary.config import (
    FrequencyConfig,
    Method,
    RotationAngles,
    Scenario,
    ScenarioConfig,
)
from nearfield_boundary.constants import PHASE_MISMATCH_LIMIT_RAD
from nearfield_boundary.errors import FormulaUnavailableError, InvalidArgumentError
from nearfield_boundary.model.formulas import (
    FormulaInput,
    aligned_ula,
    aligned_upa,
    appendix_error,
    appendix_premises_hold,
    closed_form_distance,
    closed_form_phase_spread,
    compensation_offset,
    has_exact_form,
    intermediate_d_e,
    misalignment_reduction,
    ula_approx,
    ula_exact,
    upa1_approx,
    upa1_exact,
    upa2_approx,
)

HALF_PI = math.pi / 2
angles = st.floats(-HALF_PI, HALF_PI, allow_nan=False)


def reference(theta=0.0, phi=0.0) -> FormulaInput:
    return FormulaInput(0.1, 0.05, 1e-3, theta, phi)


def test_aligned_baselines():
    assert ula_approx(reference()) == pytest.approx(45.0, rel=1e-12)
    assert ula_exact(reference()) == pytest.approx(45.0, rel=1e-12)
    assert upa1_exact(reference()) == pytest.approx(90.0, rel=1e-12)
    assert upa2_approx(reference()) == pytest.approx(90.0, rel=1e-12)
    assert aligned_ula(0.1, 0.05, 1e-3) == pytest.approx(45.0)


def test_perpendicular_rotation():
    rotated = reference(HALF_PI)
    assert ula_approx(rotated) == pytest.approx(20.0)
    assert ula_exact(rotated) == pytest.approx(20.025)
    assert upa1_approx(rotated) == pytest.approx(65.0)
    assert upa1_exact(rotated) == pytest.approx(65.025)
    assert upa2_approx(reference(0.0, HALF_PI)) == pytest.approx(65.0)


def test_misalignment_reductions():
    ula = misalignment_reduction(ula_approx(reference(t)) for t in (0.0, HALF_PI))
    upa = misalignment_reduction(upa1_approx(reference(t)) for t in (0.0, HALF_PI))
    assert ula == pytest.approx(0.5556, abs=0.001)
    assert upa == pytest.approx(0.2778, abs=0.001)


@pytest.mark.parametrize(
    "d1, d2, expected",
    [(0.20, 0.05, 0.180), (0.20, 0.015, 0.067), (0.10, 0.05, 0.278)],
)
def test_device_variations(d1, d2, expected):
    thetas = np.linspace(-HALF_PI, HALF_PI, 181)
    variation = misalignment_reduction(
        upa1_approx(FormulaInput(d1, d2, 1e-3, theta)) for theta in thetas
    )
    assert variation == pytest.approx(expected, abs=0.002)


def test_two_angle_form_reduces_to_one_angle():
    values = reference()
    for theta in np.linspace(-HALF_PI, HALF_PI, 101):
        assert upa2_approx(reference(theta, 0.0)) == upa1_approx(reference(theta))
    assert upa2_approx(values) == aligned_upa(values.d1_m, values.d2_m, values.wavelength_m)


@given(angles, angles)
@settings(max_examples=200)
def test_two_angle_form_through_d_e(theta, phi):
    values = reference(theta, phi)
    expected = 8 * intermediate_d_e(values) ** 2 / values.wavelength_m
    assert upa2_approx(values) == pytest.approx(expected, rel=1e-12)


@given(angles)
def test_symmetric_in_theta(theta):
    assert ula_exact(reference(theta)) == pytest.approx(ula_exact(reference(-theta)))
    assert upa2_approx(reference(0.3, theta)) == pytest.approx(upa2_approx(reference(0.3, -theta)))


def test_one_angle_forms_reject_phi():
    with pytest.raises(InvalidArgumentError):
        ula_exact(reference(0.1, 0.2))
    with pytest.raises(InvalidArgumentError):
        upa1_approx(reference(0.1, 0.2))
    with pytest.raises(InvalidArgumentError):
        FormulaInput(0.0, 0.05, 1e-3)


def test_closed_form_dispatch():
    frequency = FrequencyConfig.from_wavelength(1e-3)
    ula = ScenarioConfig.from_apertures(Scenario.ULA_ULA, 0.1, 0.05, frequency)
    upa = ScenarioConfig.from_apertures(
        Scenario.UPA_UPA, 0.1, 0.05, frequency, RotationAngles(0.3, 0.4)
    )
    assert closed_form_distance(ula, Method.EXACT) == pytest.approx(45.0)
    assert not has_exact_form(upa)
    with pytest.raises(FormulaUnavailableError):
        closed_form_distance(upa, Method.EXACT)
    with pytest.raises(InvalidArgumentError):
        closed_form_distance(upa, Method.SIMULATED)
    assert closed_form_distance(upa, Method.APPROX) == pytest.approx(
        upa2_approx(FormulaInput(0.1, 0.05, 1e-3, 0.3, 0.4))
    )


def test_compensation_offset():
    assert compensation_offset(reference(0.5)) == pytest.approx(0.025 * math.sin(0.5))
    assert compensation_offset(reference(0.0, -0.5)) == pytest.approx(0.025 * math.sin(0.5))


def test_phase_spread_prediction():
    assert closed_form_phase_spread(45.0, 45.0) == pytest.approx(PHASE_MISMATCH_LIMIT_RAD)
    assert closed_form_phase_spread(90.0, 45.0) == pytest.approx(PHASE_MISMATCH_LIMIT_RAD / 2)
    with pytest.raises(InvalidArgumentError):
        closed_form_phase_spread(0.01, 20.025, 0.025)


def test_appendix_premises():
    assert appendix_premises_hold(reference(0.7))
    assert appendix_premises_hold(reference(0.0, -1.2))
    assert not appendix_premises_hold(reference(math.pi / 4, math.pi / 4))


def premise_theta(phi: float, share: float, sign: float) -> float:
    # share of the largest |theta| for which the projected x extent and delta d stay within D2 / 2
    half = abs(phi) / 2
    limit = min(math.tan(half), math.tan(math.pi / 4 - half))
    return math.copysign(math.asin(share * limit), sign)


@given(
    st.floats(0.01, 0.3),
    st.floats(0.005, 0.1),
    angles,
    angles,
    st.floats(0.0, 1.0),
    st.booleans(),
    st.floats(5.0, 50.0),
    st.tuples(*[st.floats(-0.5, 0.5)] * 4),
)
@settings(max_examples=300)
def test_appendix_bound(d1, d2, theta, phi, share, theta_only, scale, fractions):
    if theta_only:
        phi = 0.0
    else:
        theta = premise_theta(phi, share, theta)
    values = FormulaInput(d1, d2, 1e-3, theta, phi)
    assume(appendix_premises_hold(values))
    ue_point = (fractions[0] * d2, fractions[1] * d2)
    ap_point = (fractions[2] * d1, fractions[3] * d1)
    error = appendix_error(values, scale * (d1 + d2), ue_point, ap_point)
    assert error.f_value_m >= -1e-13
    assert error.within_bound


def test_appendix_bound_needs_its_premises():
    values = FormulaInput(0.3, 0.005, 1e-3, HALF_PI, math.pi / 4)
    assert not appendix_premises_hold(values)
    # this UE corner lands at y = D2 / sqrt(2), as far out as delta d
    error = appendix_error(values, 1.525, (0.0025, -0.0025), (0.15, 0.15))
    assert not error.within_bound
    assert error.f_value_m / error.bound_m > 1.3


@given(angles, angles)
def test_approx_forms_decrease_with_abs_theta(first, second):
    smaller, larger = sorted((abs(first), abs(second)))
    for formula in (ula_approx, upa1_approx):
        assert formula(reference(larger)) <= formula(reference(smaller)) * (1 + 1e-12)


def test_appendix_bound_scaling():
    values = reference(0.4)
    near = appendix_error(values, 1.0, (0.01, -0.02), (0.05, 0.05))
    far = appendix_error(values, 2.0, (0.01, -0.02), (0.05, 0.05))
    assert far.bound_m / near.bound_m == 0.25
    with pytest.raises(InvalidArgumentError):
        appendix_error(values, 1.0, (0.03, 0.0), (0.0, 0.0))


if __name__ == "__main__":
    Fire()
