"""Core vocabulary tests: classification, status mapping, snapshots."""
from __future__ import annotations

import math

import pytest
from hypothesis import given, strategies as st

from metastates import (
    ATTENTION, COGNITIVE_WORKLOAD, CORE_POLARITIES, PHYSICAL_FATIGUE, STRESS,
    IncompleteVector, InvalidSample, Polarity, RangeLevel, StateRegistry,
    StatusClass, Thresholds, UnknownKind, classify_level,
    classify_level_hysteresis, level_to_status, snapshot,
)
from metastates.builtins import builtin_profile


# Independent composition oracle for snapshot(): a literal transcription of
# the two mapping tables, kept deliberately separate from the library code.
def _oracle_level(value, t_low, t_high):
    if value < t_low:
        return RangeLevel.LOW
    elif value < t_high:
        return RangeLevel.MID
    else:
        return RangeLevel.HIGH


_ORACLE_STATUS = {
    (Polarity.LOWER_IS_BETTER, RangeLevel.LOW): StatusClass.OPTIMAL,
    (Polarity.LOWER_IS_BETTER, RangeLevel.MID): StatusClass.THREAD,
    (Polarity.LOWER_IS_BETTER, RangeLevel.HIGH): StatusClass.SUBOPTIMAL,
    (Polarity.HIGHER_IS_BETTER, RangeLevel.LOW): StatusClass.SUBOPTIMAL,
    (Polarity.HIGHER_IS_BETTER, RangeLevel.MID): StatusClass.THREAD,
    (Polarity.HIGHER_IS_BETTER, RangeLevel.HIGH): StatusClass.OPTIMAL,
}

T = Thresholds(t_low=0.4, t_high=0.7)


class TestClassifyLevel:
    def test_below_both_cuts(self):
        assert classify_level(0.2, T) == RangeLevel.LOW

    def test_boundary_is_mid(self):
        # Half-open intervals: t_low itself belongs to MID.
        assert classify_level(0.4, T) == RangeLevel.MID

    def test_above_both_cuts(self):
        assert classify_level(0.95, T) == RangeLevel.HIGH

    def test_high_boundary_is_high(self):
        assert classify_level(0.7, T) == RangeLevel.HIGH

    @pytest.mark.parametrize("bad", [float("nan"), float("inf"), float("-inf")])
    def test_non_finite_rejected(self, bad):
        with pytest.raises(InvalidSample):
            classify_level(bad, T)

    @given(st.floats(min_value=-10, max_value=10),
           st.floats(min_value=-10, max_value=10))
    def test_monotone_in_value(self, a, b):
        lo, hi = min(a, b), max(a, b)
        assert classify_level(lo, T) <= classify_level(hi, T)


class TestThresholds:
    def test_inverted_rejected(self):
        with pytest.raises(ValueError):
            Thresholds(t_low=0.7, t_high=0.4)

    def test_equal_rejected(self):
        with pytest.raises(ValueError):
            Thresholds(t_low=0.5, t_high=0.5)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            Thresholds(t_low=float("nan"), t_high=1.0)


class TestLevelToStatus:
    # The full 12-entry table: per kind (with its default polarity), the three
    # levels map onto optimal / thread / suboptimal. Attention is inverted.
    TABLE = {
        (STRESS, RangeLevel.LOW): StatusClass.OPTIMAL,
        (STRESS, RangeLevel.MID): StatusClass.THREAD,
        (STRESS, RangeLevel.HIGH): StatusClass.SUBOPTIMAL,
        (ATTENTION, RangeLevel.LOW): StatusClass.SUBOPTIMAL,
        (ATTENTION, RangeLevel.MID): StatusClass.THREAD,
        (ATTENTION, RangeLevel.HIGH): StatusClass.OPTIMAL,
        (COGNITIVE_WORKLOAD, RangeLevel.LOW): StatusClass.OPTIMAL,
        (COGNITIVE_WORKLOAD, RangeLevel.MID): StatusClass.THREAD,
        (COGNITIVE_WORKLOAD, RangeLevel.HIGH): StatusClass.SUBOPTIMAL,
        (PHYSICAL_FATIGUE, RangeLevel.LOW): StatusClass.OPTIMAL,
        (PHYSICAL_FATIGUE, RangeLevel.MID): StatusClass.THREAD,
        (PHYSICAL_FATIGUE, RangeLevel.HIGH): StatusClass.SUBOPTIMAL,
    }

    @pytest.mark.parametrize("kind,level", sorted(TABLE, key=str))
    def test_full_table(self, kind, level):
        polarity = CORE_POLARITIES[kind]
        assert level_to_status(level, polarity) == self.TABLE[(kind, level)]

    def test_polarity_symmetry(self):
        reverse = {RangeLevel.LOW: RangeLevel.HIGH,
                   RangeLevel.MID: RangeLevel.MID,
                   RangeLevel.HIGH: RangeLevel.LOW}
        for level in RangeLevel:
            assert (level_to_status(level, Polarity.LOWER_IS_BETTER)
                    == level_to_status(reverse[level], Polarity.HIGHER_IS_BETTER))

    def test_total_over_all_inputs(self):
        for polarity in Polarity:
            for level in RangeLevel:
                assert isinstance(level_to_status(level, polarity), StatusClass)


class TestHysteresis:
    def test_zero_band_matches_plain_classify(self):
        for value in (0.1, 0.4, 0.5, 0.7, 0.9):
            assert (classify_level_hysteresis(value, T, RangeLevel.LOW, 0.0)
                    == classify_level(value, T))

    def test_upward_change_needs_band_clearance(self):
        band = 0.05
        # Just over the cut but inside the band: stays LOW.
        assert classify_level_hysteresis(0.42, T, RangeLevel.LOW, band) == RangeLevel.LOW
        # Clears the band: moves.
        assert classify_level_hysteresis(0.46, T, RangeLevel.LOW, band) == RangeLevel.MID

    def test_downward_change_needs_band_clearance(self):
        band = 0.05
        assert classify_level_hysteresis(0.38, T, RangeLevel.MID, band) == RangeLevel.MID
        assert classify_level_hysteresis(0.30, T, RangeLevel.MID, band) == RangeLevel.LOW

    def test_two_level_jump(self):
        band = 0.05
        assert classify_level_hysteresis(0.80, T, RangeLevel.LOW, band) == RangeLevel.HIGH
        # Over t_high but within its band: settles on MID.
        assert classify_level_hysteresis(0.72, T, RangeLevel.LOW, band) == RangeLevel.MID

    def test_no_previous_level_classifies_directly(self):
        assert classify_level_hysteresis(0.42, T, None, 0.05) == RangeLevel.MID

    def test_negative_band_rejected(self):
        with pytest.raises(ValueError):
            classify_level_hysteresis(0.5, T, RangeLevel.LOW, -0.1)


class TestSnapshot:
    @pytest.fixture
    def profile(self):
        return builtin_profile("default")

    def test_all_values_low_matches_oracle(self, profile):
        # All four raw values below t_low: the three lower-is-better kinds are
        # optimal, attention (higher-is-better) is suboptimal.
        values = {STRESS: 0.1, ATTENTION: 0.1, COGNITIVE_WORKLOAD: 0.1,
                  PHYSICAL_FATIGUE: 0.1}
        snap = snapshot(values, profile, timestamp_ms=0)
        for kind, value in values.items():
            kp = profile.kinds[kind]
            level = _oracle_level(value, kp.thresholds.t_low, kp.thresholds.t_high)
            assert snap.readings[kind].level == level
            assert snap.readings[kind].status == _ORACLE_STATUS[(kp.polarity, level)]
        assert snap.readings[ATTENTION].status == StatusClass.SUBOPTIMAL
        assert all(snap.readings[k].status == StatusClass.OPTIMAL
                   for k in (STRESS, COGNITIVE_WORKLOAD, PHYSICAL_FATIGUE))

    def test_threading_stress_matches_oracle(self, profile):
        values = {STRESS: 0.5, ATTENTION: 0.9, COGNITIVE_WORKLOAD: 0.2,
                  PHYSICAL_FATIGUE: 0.1}
        snap = snapshot(values, profile, timestamp_ms=10)
        assert snap.readings[STRESS].status == StatusClass.THREAD
        for kind in (ATTENTION, COGNITIVE_WORKLOAD, PHYSICAL_FATIGUE):
            kp = profile.kinds[kind]
            level = _oracle_level(values[kind], kp.thresholds.t_low, kp.thresholds.t_high)
            assert snap.readings[kind].status == _ORACLE_STATUS[(kp.polarity, level)]
            assert snap.readings[kind].status == StatusClass.OPTIMAL

    def test_missing_kind_raises(self, profile):
        values = {STRESS: 0.5, COGNITIVE_WORKLOAD: 0.2, PHYSICAL_FATIGUE: 0.1}
        with pytest.raises(IncompleteVector) as excinfo:
            snapshot(values, profile, timestamp_ms=0)
        assert ATTENTION in excinfo.value.missing

    def test_non_finite_value_names_kind_and_time(self, profile):
        values = {STRESS: math.nan, ATTENTION: 0.9, COGNITIVE_WORKLOAD: 0.2,
                  PHYSICAL_FATIGUE: 0.1}
        with pytest.raises(InvalidSample) as excinfo:
            snapshot(values, profile, timestamp_ms=1234)
        assert excinfo.value.kind == STRESS
        assert excinfo.value.timestamp_ms == 1234

    def test_rederivable(self, profile):
        values = {STRESS: 0.41, ATTENTION: 0.69, COGNITIVE_WORKLOAD: 0.7,
                  PHYSICAL_FATIGUE: 0.39}
        first = snapshot(values, profile, timestamp_ms=5)
        second = snapshot(first.values(), profile, timestamp_ms=5)
        assert first == second

    @given(st.dictionaries(
        st.sampled_from([STRESS, ATTENTION, COGNITIVE_WORKLOAD, PHYSICAL_FATIGUE]),
        st.floats(min_value=-1, max_value=2, allow_nan=False),
        min_size=4, max_size=4))
    def test_snapshot_matches_oracle_everywhere(self, values):
        profile = builtin_profile("default")
        snap = snapshot(values, profile, timestamp_ms=0)
        for kind, value in values.items():
            kp = profile.kinds[kind]
            level = _oracle_level(value, kp.thresholds.t_low, kp.thresholds.t_high)
            assert snap.readings[kind].level == level
            assert snap.readings[kind].status == _ORACLE_STATUS[(kp.polarity, level)]


class TestRegistry:
    def test_core_kinds_always_present(self):
        registry = StateRegistry()
        assert set(registry.names()) == {STRESS, ATTENTION, COGNITIVE_WORKLOAD,
                                         PHYSICAL_FATIGUE}

    def test_default_polarities(self):
        registry = StateRegistry()
        assert registry.default_polarity(ATTENTION) == Polarity.HIGHER_IS_BETTER
        for kind in (STRESS, COGNITIVE_WORKLOAD, PHYSICAL_FATIGUE):
            assert registry.default_polarity(kind) == Polarity.LOWER_IS_BETTER

    def test_register_new_kind(self):
        registry = StateRegistry()
        registry.register("heart_rate", Polarity.LOWER_IS_BETTER)
        assert "heart_rate" in registry
        assert len(registry) == 5

    @pytest.mark.parametrize("bad", ["", "Stress", "heart rate", "9lives", "a-b"])
    def test_invalid_names_rejected(self, bad):
        registry = StateRegistry()
        with pytest.raises(ValueError):
            registry.register(bad, Polarity.LOWER_IS_BETTER)

    def test_duplicate_rejected(self):
        registry = StateRegistry()
        with pytest.raises(ValueError):
            registry.register(STRESS, Polarity.LOWER_IS_BETTER)

    def test_unknown_lookup_raises(self):
        registry = StateRegistry()
        with pytest.raises(UnknownKind):
            registry.default_polarity("heart_rate")
