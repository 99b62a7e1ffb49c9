import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from oscbound import catalog
from oscbound.clock_model import SyncRequirement
from oscbound.error_budget import (
    AgingSpec,
    MinorSources,
    OscillatorClass,
    OscillatorSpec,
    TemperatureModel,
    accuracy_bound_dominates,
    aging_bound,
    bisect_increasing,
    bound_value,
    cumulative_bound_array,
    evaluate,
    max_reset_period,
    max_reset_period_bisect,
    misalignment_bound,
    misalignment_bound_between,
    suitability,
    temp_accuracy,
    total_accuracy_bound,
    vibration_accuracy,
    worst_case_temp_accuracy,
)
from oscbound.errors import InvalidParameterError, OutOfRangeError
from oscbound.units import DAY, PPB, PPM, YEAR

from conftest import make_spec

PARABOLIC = TemperatureModel.parabolic(-0.44 * PPM, -40.0, 85.0)


def quadrature_oracle(spec, T_R, n=200_001):
    """Trapezoid of the pointwise accuracy bound on a grid that contains the aging knee.

    The integrand is piecewise linear, so the composite rule is exact up to
    rounding and independent of the closed-form branches.
    """
    grid = np.linspace(0.0, T_R, n)
    if 0 < spec.aging.t_data < T_R:
        grid = np.union1d(grid, [spec.aging.t_data])
    vals = np.array([total_accuracy_bound(spec, float(t)) for t in grid])
    return float(np.trapezoid(vals, grid))


specs_strategy = st.builds(
    make_spec,
    y_temp_ppm=st.floats(0.0, 100.0),
    y_age_ppm=st.floats(0.0, 20.0),
    included=st.booleans(),
    t_data=st.floats(30 * DAY, 10 * YEAR),
    y_supp=st.sampled_from([0.0, 0.1 * PPM, 1 * PPB]),
).filter(lambda s: bound_value(s, 1.0) > 0)


class TestTemperature:
    def test_at_calibration_point(self):
        assert temp_accuracy(PARABOLIC, 25.0) == 0.0

    def test_parabolic_ten_degrees_off(self):
        # |A| * (35 - 25)^2 = 0.44 ppm * 100
        assert temp_accuracy(PARABOLIC, 35.0) == pytest.approx(44 * PPM, rel=1e-12)

    @pytest.mark.parametrize("x", [-40.0, 0.0, 25.0, 85.0])
    def test_constant_bound(self, x):
        m = TemperatureModel.constant(0.5 * PPM, -40.0, 85.0)
        assert temp_accuracy(m, x) == 0.5 * PPM

    def test_linear(self):
        m = TemperatureModel.linear(-0.02 * PPM, -40.0, 85.0)
        assert temp_accuracy(m, 15.0) == pytest.approx(0.2 * PPM)

    @pytest.mark.parametrize("x, limit", [(-41.0, "x_min"), (85.5, "x_max")])
    def test_out_of_range_names_limit(self, x, limit):
        with pytest.raises(OutOfRangeError) as info:
            temp_accuracy(PARABOLIC, x)
        assert info.value.limit == limit
        assert limit in str(info.value)

    @given(
        st.sampled_from(["linear", "parabolic"]),
        st.floats(-1e-6, 1e-6),
        st.floats(-60, 20),
        st.floats(1, 120),
        st.floats(0, 1),
    )
    def test_worst_case_on_boundary(self, kind, coef, x_min, width, u):
        x_max = x_min + width
        x0 = x_min + u * width
        m = getattr(TemperatureModel, kind)(coef, x_min, x_max, x0)
        dense = max(temp_accuracy(m, float(x)) for x in np.linspace(x_min, x_max, 257))
        assert worst_case_temp_accuracy(m) >= dense * (1 - 1e-12)
        assert worst_case_temp_accuracy(m) == max(temp_accuracy(m, x_min), temp_accuracy(m, x_max))

    def test_invalid_range(self):
        with pytest.raises(InvalidParameterError):
            TemperatureModel.constant(1e-6, 10.0, 10.0)
        with pytest.raises(InvalidParameterError):
            TemperatureModel.parabolic(-1e-8, 30.0, 40.0)  # x0 = 25 outside


class TestAging:
    SPEC = AgingSpec(1 * PPM, YEAR)

    def test_linear_branch(self):
        assert aging_bound(self.SPEC, 2 * YEAR) == pytest.approx(2 * PPM, rel=1e-15)

    def test_constant_branch(self):
        assert aging_bound(self.SPEC, 0.5 * YEAR) == 1 * PPM

    def test_included(self):
        assert aging_bound(AgingSpec(3 * PPM, YEAR, True), 5 * YEAR) == 0.0

    def test_negative_elapsed(self):
        with pytest.raises(InvalidParameterError):
            aging_bound(self.SPEC, -1.0)

    def test_continuous_at_knee(self):
        assert aging_bound(self.SPEC, YEAR) == aging_bound(self.SPEC, math.nextafter(YEAR, math.inf)) or (
            abs(aging_bound(self.SPEC, math.nextafter(YEAR, math.inf)) - PPM) < 1e-20
        )


class TestVibrationAndTotal:
    def test_vibration(self):
        assert vibration_accuracy(0.1 * PPB, 1.0) == pytest.approx(0.1 * PPB)
        assert vibration_accuracy(0.1 * PPB, 0.0) == 0.0
        assert vibration_accuracy(0.1 * PPB, 0.5) == pytest.approx(0.05 * PPB)

    def test_total_two_years(self):
        assert total_accuracy_bound(make_spec(0.5, 1.0), 2 * YEAR) == pytest.approx(2.5 * PPM, rel=1e-15)

    def test_total_half_year(self):
        assert total_accuracy_bound(make_spec(0.5, 1.0), 0.5 * YEAR) == pytest.approx(1.5 * PPM, rel=1e-15)

    def test_total_ideal(self):
        assert total_accuracy_bound(make_spec(0.0, 0.0), 3 * YEAR) == 0.0

    def test_minor_sources_add(self):
        s = make_spec(0.5, 1.0, k_vib=0.1 * PPB, a_max=2.0, y_supp=0.01 * PPM)
        assert total_accuracy_bound(s, 0.0) == pytest.approx(0.5 * PPM + PPM + 0.2 * PPB + 0.01 * PPM)

    @pytest.mark.parametrize("field", ["k_vib", "y_supp", "y_calib", "y_grav", "a_max"])
    def test_minor_sources_reject_negative(self, field):
        with pytest.raises(InvalidParameterError):
            MinorSources(**{field: -1.0})


class TestMisalignmentBound:
    @pytest.mark.parametrize(
        "y_temp, y_age, included, T_R, expected, unit",
        [
            (0.5, 1.0, False, 2 * YEAR, 110.38, 1.0),
            (2.0, 1.0, False, 2 * YEAR, 204.98, 1.0),
            (20.0, 0.0, True, 2 * YEAR, 21.02, 60.0),
        ],
    )
    def test_published_values(self, y_temp, y_age, included, T_R, expected, unit):
        B = bound_value(make_spec(y_temp, y_age, included), T_R) / unit
        assert round(B, 2) == expected

    def test_hand_values(self):
        # 0.5 ppm * 2y + 0.5 ppm * (1y + 4y^2/1y) = 1 ppm.y + 2.5 ppm.y = 3.5 ppm.y
        assert bound_value(make_spec(0.5, 1.0), 2 * YEAR) == pytest.approx(3.5 * PPM * YEAR, rel=1e-15)
        # below the knee: (0.5 + 1) ppm * 0.5 y
        assert bound_value(make_spec(0.5, 1.0), 0.5 * YEAR) == pytest.approx(0.75 * PPM * YEAR, rel=1e-15)

    def test_ideal(self):
        assert bound_value(make_spec(0.0, 0.0), YEAR) == 0.0

    @pytest.mark.parametrize("T_R", [0.0, -1.0])
    def test_rejects_nonpositive(self, T_R):
        with pytest.raises(InvalidParameterError):
            misalignment_bound(make_spec(), T_R)

    @settings(max_examples=40, deadline=None)
    @given(specs_strategy, st.floats(0.01, 5.0))
    def test_matches_quadrature_oracle(self, spec, years):
        T_R = years * YEAR
        assert bound_value(spec, T_R) == pytest.approx(quadrature_oracle(spec, T_R, 2001), rel=1e-9)

    def test_knee_branches_agree_exactly(self):
        for entry in catalog.embedded_catalog():
            s = entry.spec
            if s.aging.included_in_accuracy:
                continue
            Td, ya, yt = s.aging.t_data, s.aging.y_age, s.y_temp
            low = (yt + ya) * Td
            high = yt * Td + 0.5 * ya * (Td + Td * Td / Td)
            assert abs(low - high) <= 1e-12 * low

    @settings(max_examples=50, deadline=None)
    @given(specs_strategy, st.floats(0.001, 10.0))
    def test_breakdown_sums_to_bound(self, spec, years):
        res = misalignment_bound(spec, years * YEAR)
        assert abs(sum(res.breakdown.values()) - res.B) <= 1e-9

    @settings(max_examples=50, deadline=None)
    @given(specs_strategy)
    def test_increasing_and_convex(self, spec):
        grid = np.geomspace(DAY, 10 * YEAR, 50)
        B = np.array([bound_value(spec, float(t)) for t in grid])
        assert np.all(np.diff(B) > 0)
        if not spec.aging.included_in_accuracy:
            assert np.all(np.diff(B, 2) >= -1e-12 * B[2:])
            slopes = np.diff(B) / np.diff(grid)
            assert np.all(np.diff(slopes) >= -1e-12 * slopes[1:])

    def test_between_is_difference(self):
        s = make_spec(0.5, 1.0)
        a, b = 0.3 * YEAR, 1.7 * YEAR
        assert misalignment_bound_between(s, a, b) == pytest.approx(bound_value(s, b) - bound_value(s, a))
        assert misalignment_bound_between(s, 0.0, b) == pytest.approx(bound_value(s, b))

    def test_cumulative_array_matches_scalar(self):
        s = make_spec(0.5, 1.0, y_calib=0.01 * PPM)
        T = np.array([0.0, 1.0, YEAR, 2 * YEAR, 7.3 * YEAR])
        expect = [0.0] + [bound_value(s, float(t)) for t in T[1:]]
        np.testing.assert_allclose(cumulative_bound_array(s, T), expect, rtol=1e-15)


class TestMaxResetPeriod:
    @pytest.mark.parametrize(
        "y_temp, y_age, included, T_L, expected, unit",
        [
            (0.5, 1.0, False, 15.0, 115.74, DAY),
            (0.5, 1.0, False, 165.0, 2.62, YEAR),
            (0.5, 0.5, False, 165.0, 3.57, YEAR),
            (50.0, 0.0, True, 15.0, 3.47, DAY),
            (50.0, 0.0, True, 165.0, 38.19, DAY),
        ],
    )
    def test_published_values(self, y_temp, y_age, included, T_L, expected, unit):
        T = max_reset_period(make_spec(y_temp, y_age, included), T_L) / unit
        assert round(T, 2) == expected

    def test_unbounded(self):
        assert max_reset_period(make_spec(0.0, 0.0), 15.0) == math.inf
        assert max_reset_period_bisect(make_spec(0.0, 0.0), 15.0) == math.inf

    def test_rejects_nonpositive_T_L(self):
        with pytest.raises(InvalidParameterError):
            max_reset_period(make_spec(), 0.0)

    @pytest.mark.parametrize("T_L", [15.0, 165.0])
    def test_closed_form_matches_bisection_on_catalog(self, all_entries, T_L):
        for entry in all_entries:
            closed = max_reset_period(entry.spec, T_L)
            oracle = max_reset_period_bisect(entry.spec, T_L)
            assert closed == pytest.approx(oracle, rel=1e-9), entry.name

    @settings(max_examples=80, deadline=None)
    @given(specs_strategy, st.floats(1.0, 1e4))
    def test_inverse_consistency(self, spec, T_L):
        T = max_reset_period(spec, T_L)
        assume(T < 1e12)
        assert bound_value(spec, T) == pytest.approx(T_L, rel=1e-9)
        assert T == pytest.approx(max_reset_period_bisect(spec, T_L), rel=1e-9)

    def test_bisection_expands_bracket(self):
        # root far below 1 s and far above 100 years
        assert bisect_increasing(lambda x: x, 1e-3, rtol=1e-13) == pytest.approx(1e-3, rel=1e-12)
        assert bisect_increasing(lambda x: x, 1e12, rtol=1e-13) == pytest.approx(1e12, rel=1e-12)


class TestSuitability:
    def test_tg5035_at_165(self, tg5035):
        res = suitability(tg5035, SyncRequirement(165.0, 2 * YEAR))
        assert res.suitable is True
        assert round(res.B, 2) == 110.38

    def test_tg5035_at_15(self, tg5035):
        assert suitability(tg5035, SyncRequirement(15.0, 2 * YEAR)).suitable is False

    def test_ideal(self):
        res = suitability(make_spec(0.0, 0.0), SyncRequirement(15.0, YEAR))
        assert res.suitable is True and res.B == 0.0

    def test_evaluate_fills_both_thresholds(self, tg5035):
        res = evaluate(tg5035, 2 * YEAR, [15.0, 165.0])
        assert res.verdicts == {15.0: False, 165.0: True}
        assert round(res.T_R_max_15 / DAY, 2) == 115.74
        assert round(res.T_R_max_165 / YEAR, 2) == 2.62
        assert res.suitable is False


def test_dominance_relation():
    big, small = make_spec(2.0, 1.0), make_spec(0.5, 1.0)
    assert accuracy_bound_dominates(big, small)
    assert not accuracy_bound_dominates(small, big)
    # large temperature figure but aging folded in: the aging slope wins eventually
    flat = make_spec(5.0, 0.0, included=True)
    assert not accuracy_bound_dominates(flat, small)
    assert not accuracy_bound_dominates(small, flat)


def test_spec_requires_fields():
    with pytest.raises(InvalidParameterError):
        OscillatorSpec("", "X", OscillatorClass.XO, TemperatureModel.constant(1e-6, 0, 50), AgingSpec())
