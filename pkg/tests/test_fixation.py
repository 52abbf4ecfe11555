from __future__ import annotations

import math

import pytest

from gazepath.fixation import (
    FilterConfig,
    Fixation,
    angular_velocity,
    detect_fixations,
    ivt_classify,
    low_pass,
    merge_fixations,
    visual_angle_deg,
)
from gazepath.gaze_ingest import DEFAULT_SCREEN, GazeSample, GazeStream

CFG = FilterConfig()


def _stream(points, rate=60.0, valid=None):
    step = round(1e6 / rate)
    samples = [
        GazeSample(
            t_us=i * step,
            x=x,
            y=y,
            valid=True if valid is None else valid[i],
        )
        for i, (x, y) in enumerate(points)
    ]
    return GazeStream("p", "m", rate, samples)


class TestLowPass:
    def test_window_one_is_identity(self):
        stream = _stream([(0.1 * i % 1.0, 0.5) for i in range(10)])
        assert low_pass(stream, 1) is stream

    def test_constant_stream_unchanged(self):
        stream = _stream([(0.4, 0.4)] * 10)
        out = low_pass(stream, 5)
        assert all(s.x == 0.4 and s.y == 0.4 for s in out.samples)

    def test_single_spike_removed(self):
        points = [(0.5, 0.5)] * 5
        points[2] = (0.7, 0.5)
        out = low_pass(_stream(points), 3)
        # Median of (0.5, 0.7, 0.5) is 0.5: the spike vanishes.
        assert out.samples[2].x == 0.5

    def test_even_window_rejected(self):
        with pytest.raises(ValueError):
            low_pass(_stream([(0.5, 0.5)] * 4), 2)

    def test_invalid_samples_left_alone(self):
        stream = _stream([(0.5, 0.5)] * 5, valid=[True, True, False, True, True])
        out = low_pass(stream, 3)
        assert not out.samples[2].valid
        assert out.samples[2].x == 0.5

    def test_timestamps_unchanged(self):
        stream = _stream([(0.1, 0.2), (0.3, 0.4), (0.5, 0.6)])
        out = low_pass(stream, 3)
        assert [s.t_us for s in out.samples] == [s.t_us for s in stream.samples]


class TestAngularVelocity:
    def test_identical_positions_zero(self):
        v = angular_velocity(_stream([(0.5, 0.5), (0.5, 0.5)]), DEFAULT_SCREEN)
        assert v == [0.0]

    def test_hand_trigonometry(self):
        # 10 mm horizontal at 650 mm over 16.67 ms: 2*atan(5/650) deg / dt.
        dx_norm = 10.0 / DEFAULT_SCREEN.width_mm
        stream = _stream([(0.5, 0.5), (0.5 + dx_norm, 0.5)], rate=60.0)
        (v,) = angular_velocity(stream, DEFAULT_SCREEN)
        theta = math.degrees(2 * math.atan(5.0 / 650.0))
        assert theta == pytest.approx(0.8814, abs=1e-3)
        assert v == pytest.approx(theta / (round(1e6 / 60) / 1e6), rel=1e-6)
        assert v == pytest.approx(52.9, abs=0.2)

    def test_pair_straddling_invalid_is_none(self):
        stream = _stream([(0.5, 0.5)] * 3, valid=[True, False, True])
        assert angular_velocity(stream, DEFAULT_SCREEN) == [None, None]
        stream = _stream([(0.5, 0.5)] * 4, valid=[True, False, True, True])
        v = angular_velocity(stream, DEFAULT_SCREEN)
        assert v[0] is None and v[1] is None and v[2] == 0.0

    def test_fewer_than_two_valid_empty(self):
        stream = _stream([(0.5, 0.5)], rate=60.0)
        assert angular_velocity(stream, DEFAULT_SCREEN) == []


class TestIvtClassify:
    def test_constant_gaze_single_fixation(self):
        stream = _stream([(0.5, 0.5)] * 120, rate=60.0)  # 2 s
        fixations = ivt_classify(stream, CFG, DEFAULT_SCREEN)
        assert len(fixations) == 1
        assert fixations[0].duration_ms == pytest.approx(2000, rel=0.02)
        assert fixations[0].centroid_x == 0.5

    def test_alternating_jumps_no_fixations(self):
        points = [((0.2, 0.2) if i % 2 == 0 else (0.8, 0.8)) for i in range(60)]
        assert ivt_classify(_stream(points), CFG, DEFAULT_SCREEN) == []

    def test_dwell_saccade_dwell(self):
        # 300 ms at (0.3, 0.3), one-sample jump, 300 ms at (0.7, 0.7).
        n = round(0.3 * 60)
        points = [(0.3, 0.3)] * n + [(0.7, 0.7)] * n
        fixations = ivt_classify(_stream(points), CFG, DEFAULT_SCREEN)
        assert len(fixations) == 2
        assert fixations[0].centroid_x == pytest.approx(0.3)
        assert fixations[1].centroid_x == pytest.approx(0.7)

    def test_brute_force_run_scan_agreement(self):
        # Oracle: recompute runs directly from velocities.
        n = round(0.3 * 60)
        points = [(0.3, 0.3)] * n + [(0.7, 0.7)] * n
        stream = _stream(points)
        velocities = angular_velocity(stream, DEFAULT_SCREEN)
        runs = []
        start = 0
        for i, v in enumerate(velocities):
            if v is None or v >= CFG.velocity_threshold_deg_s:
                runs.append((start, i))
                start = i + 1
        runs.append((start, len(stream.samples) - 1))
        long_runs = [
            r
            for r in runs
            if (stream.samples[r[1]].t_us - stream.samples[r[0]].t_us) / 1e3
            >= CFG.min_fixation_duration_ms
        ]
        assert len(ivt_classify(stream, CFG, DEFAULT_SCREEN)) == len(long_runs)

    def test_short_candidates_dropped(self):
        points = [(0.3, 0.3)] * 3 + [(0.7, 0.7)] * 30  # 50 ms run then 500 ms
        fixations = ivt_classify(_stream(points), CFG, DEFAULT_SCREEN)
        assert len(fixations) == 1

    def test_invalid_gap_splits_runs(self):
        n = round(0.3 * 60)
        valid = [True] * n + [False] + [True] * n
        points = [(0.5, 0.5)] * (2 * n + 1)
        fixations = ivt_classify(_stream(points, valid=valid), CFG, DEFAULT_SCREEN)
        assert len(fixations) == 2

    def test_empty_stream(self):
        assert ivt_classify(_stream([]), CFG, DEFAULT_SCREEN) == []

    def test_emitted_velocities_below_threshold(self):
        n = round(0.3 * 60)
        points = [(0.3, 0.3)] * n + [(0.7, 0.7)] * n
        stream = _stream(points)
        velocities = angular_velocity(stream, DEFAULT_SCREEN)
        for fix in ivt_classify(stream, CFG, DEFAULT_SCREEN):
            idx = [i for i, s in enumerate(stream.samples) if fix.t_start_us <= s.t_us <= fix.t_end_us]
            for i in idx[:-1]:
                assert velocities[i] < CFG.velocity_threshold_deg_s


class TestMerge:
    def test_close_fixations_merge(self):
        # 40 ms apart, ~0.2 deg apart.
        sep_norm = 0.2 / visual_angle_deg(1.0, 0.0, DEFAULT_SCREEN)
        a = Fixation(0, 200_000, 0.5, 0.5, 12)
        b = Fixation(240_000, 440_000, 0.5 + sep_norm, 0.5, 12)
        merged = merge_fixations([a, b], CFG, DEFAULT_SCREEN)
        assert len(merged) == 1
        assert merged[0].t_start_us == 0 and merged[0].t_end_us == 440_000
        assert merged[0].sample_count == 24

    def test_far_apart_unchanged(self):
        a = Fixation(0, 200_000, 0.5, 0.5, 12)
        b = Fixation(700_000, 900_000, 0.5, 0.5, 12)
        assert merge_fixations([a, b], CFG, DEFAULT_SCREEN) == [a, b]

    def test_empty_list(self):
        assert merge_fixations([], CFG, DEFAULT_SCREEN) == []

    def test_unordered_rejected(self):
        a = Fixation(100_000, 200_000, 0.5, 0.5, 6)
        b = Fixation(0, 50_000, 0.5, 0.5, 6)
        with pytest.raises(ValueError):
            merge_fixations([a, b], CFG, DEFAULT_SCREEN)

    def test_idempotent(self):
        sep_norm = 0.2 / visual_angle_deg(1.0, 0.0, DEFAULT_SCREEN)
        fixations = [
            Fixation(i * 260_000, i * 260_000 + 200_000, 0.4 + i * sep_norm, 0.5, 12)
            for i in range(4)
        ]
        once = merge_fixations(fixations, CFG, DEFAULT_SCREEN)
        assert merge_fixations(once, CFG, DEFAULT_SCREEN) == once

    def test_duration_weighted_centroid(self):
        a = Fixation(0, 300_000, 0.5, 0.5, 18)
        b = Fixation(320_000, 420_000, 0.502, 0.5, 6)
        (m,) = merge_fixations([a, b], CFG, DEFAULT_SCREEN)
        assert m.centroid_x == pytest.approx((0.5 * 300_000 + 0.502 * 100_000) / 400_000)


def test_pipeline_determinism():
    n = round(0.3 * 60)
    points = [(0.3, 0.3)] * n + [(0.7, 0.7)] * n
    stream = _stream(points)
    a = detect_fixations(stream, CFG, DEFAULT_SCREEN)
    b = detect_fixations(stream, CFG, DEFAULT_SCREEN)
    assert a == b


def test_fixations_time_ordered_and_non_overlapping():
    n = round(0.3 * 60)
    points = ([(0.2, 0.2)] * n + [(0.5, 0.5)] * n + [(0.8, 0.8)] * n)
    fixations = detect_fixations(_stream(points), CFG, DEFAULT_SCREEN)
    for a, b in zip(fixations, fixations[1:]):
        assert a.t_end_us < b.t_start_us


def test_filter_config_validation():
    with pytest.raises(ValueError):
        FilterConfig(smoothing_window_samples=2)
    with pytest.raises(ValueError):
        FilterConfig(velocity_threshold_deg_s=0)
    with pytest.raises(ValueError):
        FilterConfig(min_fixation_duration_ms=0)
