"""Calibration tests pinned to an independent sort-and-interpolate oracle.

The oracle below was written before the library implementation and uses a
different interpolation formula (weighted average of the two order
statistics instead of offset-from-lower), so agreement is meaningful.
"""
from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, strategies as st

from metastates import (
    BaselineDataset, CalibrationConfig, DegenerateDistribution,
    InsufficientData, RawSample, StateRegistry, Thresholds, calibrate,
    merge_calibration,
)


def quantile_oracle(values, p):
    ordered = sorted(values)
    rank = p * (len(ordered) - 1)
    below = int(math.floor(rank))
    above = min(below + 1, len(ordered) - 1)
    weight = rank - below
    return ordered[below] * (1.0 - weight) + ordered[above] * weight


def dataset_of(values, kind="stress"):
    return BaselineDataset(samples={
        kind: tuple((i, float(v)) for i, v in enumerate(values))})


class TestCalibrate:
    def test_hundred_point_ramp_matches_oracle(self):
        # Values 0..99, defaults p_low=0.60 / p_high=0.85. Oracle gives
        # 59.4 and 84.15 (frozen from running quantile_oracle by hand).
        values = list(range(100))
        config = CalibrationConfig()
        fitted = calibrate(dataset_of(values), config)["stress"]
        assert fitted.t_low == pytest.approx(59.4, abs=1e-9)
        assert fitted.t_high == pytest.approx(84.15, abs=1e-9)
        assert fitted.t_low == pytest.approx(quantile_oracle(values, 0.60), abs=1e-9)
        assert fitted.t_high == pytest.approx(quantile_oracle(values, 0.85), abs=1e-9)

    def test_shuffled_input_same_fit(self):
        values = list(range(100))
        random.Random(3).shuffle(values)
        fitted = calibrate(dataset_of(values), CalibrationConfig())["stress"]
        assert fitted.t_low == pytest.approx(59.4, abs=1e-9)

    def test_constant_data_is_degenerate(self):
        with pytest.raises(DegenerateDistribution) as excinfo:
            calibrate(dataset_of([5.0] * 40), CalibrationConfig())
        assert excinfo.value.kind == "stress"

    def test_too_few_samples(self):
        with pytest.raises(InsufficientData) as excinfo:
            calibrate(dataset_of(range(10)), CalibrationConfig(min_samples=30))
        err = excinfo.value
        assert (err.kind, err.have, err.need) == ("stress", 10, 30)

    def test_registry_coverage_required(self):
        registry = StateRegistry()
        with pytest.raises(InsufficientData) as excinfo:
            calibrate(dataset_of(range(50), kind="stress"),
                      CalibrationConfig(), registry=registry)
        assert excinfo.value.have == 0

    def test_random_datasets_match_oracle(self):
        rng = random.Random(20240902)
        config = CalibrationConfig()
        for _ in range(50):
            n = rng.randint(30, 200)
            values = [rng.gauss(rng.uniform(-5, 5), rng.uniform(0.1, 3))
                      for _ in range(n)]
            fitted = calibrate(dataset_of(values), config)["stress"]
            assert fitted.t_low == pytest.approx(
                quantile_oracle(values, config.p_low), abs=1e-9)
            assert fitted.t_high == pytest.approx(
                quantile_oracle(values, config.p_high), abs=1e-9)
            assert min(values) <= fitted.t_low < fitted.t_high <= max(values)

    def test_per_kind_override(self):
        values = list(range(100))
        config = CalibrationConfig(overrides={"stress": (0.5, 0.9)})
        fitted = calibrate(dataset_of(values), config)["stress"]
        assert fitted.t_low == pytest.approx(quantile_oracle(values, 0.5), abs=1e-9)
        assert fitted.t_high == pytest.approx(quantile_oracle(values, 0.9), abs=1e-9)

    def test_duplicated_dataset_is_stable(self):
        rng = random.Random(11)
        values = [rng.uniform(0, 10) for _ in range(60)]
        once = calibrate(dataset_of(values), CalibrationConfig())["stress"]
        twice = calibrate(dataset_of(values + values), CalibrationConfig())["stress"]
        assert once.t_low == pytest.approx(twice.t_low, abs=1e-9)
        assert once.t_high == pytest.approx(twice.t_high, abs=1e-9)

    @given(st.floats(min_value=0.01, max_value=100.0))
    def test_scale_equivariance(self, c):
        values = [1.0, 2.0, 5.0, 7.5, 9.0, 12.0, 13.0, 20.0] * 5
        config = CalibrationConfig(min_samples=10)
        base = calibrate(dataset_of(values), config)["stress"]
        scaled = calibrate(dataset_of([v * c for v in values]), config)["stress"]
        assert scaled.t_low == pytest.approx(base.t_low * c, rel=1e-9)
        assert scaled.t_high == pytest.approx(base.t_high * c, rel=1e-9)

    def test_from_samples_groups_and_sorts(self):
        samples = [RawSample(20, "stress", 1.0), RawSample(10, "stress", 2.0),
                   RawSample(5, "attention", 3.0)]
        ds = BaselineDataset.from_samples(samples)
        assert ds.samples["stress"] == ((10, 2.0), (20, 1.0))
        assert ds.values("attention") == [3.0]

    def test_out_of_order_timestamps_rejected(self):
        with pytest.raises(ValueError):
            BaselineDataset(samples={"stress": ((10, 1.0), (5, 2.0))})


class TestConfig:
    @pytest.mark.parametrize("p_low,p_high", [(0.0, 0.5), (0.5, 1.0),
                                              (0.7, 0.6), (0.5, 0.5)])
    def test_bad_fractions_rejected(self, p_low, p_high):
        with pytest.raises(ValueError):
            CalibrationConfig(p_low=p_low, p_high=p_high)

    def test_bad_min_samples_rejected(self):
        with pytest.raises(ValueError):
            CalibrationConfig(min_samples=0)

    def test_defaults(self):
        config = CalibrationConfig()
        assert (config.p_low, config.p_high, config.min_samples) == (0.60, 0.85, 30)


class TestMerge:
    OLD = Thresholds(0.4, 0.7)
    NEW = Thresholds(0.6, 0.9)

    def test_weight_zero_keeps_old(self):
        assert merge_calibration(self.OLD, self.NEW, 0.0) == self.OLD

    def test_weight_one_takes_new(self):
        assert merge_calibration(self.OLD, self.NEW, 1.0) == self.NEW

    def test_midpoint(self):
        merged = merge_calibration(self.OLD, self.NEW, 0.5)
        assert merged.t_low == pytest.approx(0.5)
        assert merged.t_high == pytest.approx(0.8)

    def test_out_of_range_weight_rejected(self):
        with pytest.raises(ValueError):
            merge_calibration(self.OLD, self.NEW, 1.5)

    @given(st.floats(min_value=0.0, max_value=1.0))
    def test_merge_preserves_ordering(self, weight):
        merged = merge_calibration(self.OLD, self.NEW, weight)
        assert merged.t_low < merged.t_high
