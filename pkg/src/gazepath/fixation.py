"""Fixation extraction: median denoising, I-VT classification, merging.

The stages follow the usual velocity-threshold recipe: smooth the raw
samples with a moving median, compute inter-sample angular velocities from
screen millimetres and viewer distance, keep maximal low-velocity runs as
fixation candidates, drop short ones, then merge fixations separated by a
small temporal and spatial gap so recordings at different sampling rates
produce comparable fixation sequences.
"""
from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, replace
from typing import List, Optional

from .gaze_ingest import GazeSample, GazeStream, ScreenGeometry


@dataclass(frozen=True)
class FilterConfig:
    smoothing_window_samples: int = 3
    velocity_threshold_deg_s: float = 30.0
    min_fixation_duration_ms: float = 100.0
    merge_max_gap_ms: float = 75.0
    merge_max_dist_deg: float = 0.7

    def __post_init__(self) -> None:
        if self.smoothing_window_samples < 1 or self.smoothing_window_samples % 2 == 0:
            raise ValueError("smoothing_window_samples must be odd and >= 1")
        if self.velocity_threshold_deg_s <= 0:
            raise ValueError("velocity_threshold_deg_s must be > 0")
        if self.min_fixation_duration_ms <= 0:
            raise ValueError("min_fixation_duration_ms must be > 0")


@dataclass(frozen=True)
class Fixation:
    t_start_us: int
    t_end_us: int
    centroid_x: float
    centroid_y: float
    sample_count: int

    @property
    def duration_ms(self) -> float:
        return (self.t_end_us - self.t_start_us) / 1e3


def visual_angle_deg(dx_norm: float, dy_norm: float, geom: ScreenGeometry) -> float:
    """Visual angle subtended by a normalized on-screen displacement."""
    dx_mm = dx_norm * geom.width_mm
    dy_mm = dy_norm * geom.height_mm
    dist_mm = math.hypot(dx_mm, dy_mm)
    return math.degrees(2.0 * math.atan2(dist_mm / 2.0, geom.viewer_distance_mm))


def low_pass(stream: GazeStream, window: int) -> GazeStream:
    """Centered moving-median smoothing of valid sample coordinates.

    Invalid samples are excluded from every window and left untouched;
    windows are clipped at stream boundaries; timestamps are unchanged.
    """
    if window < 1 or window % 2 == 0:
        raise ValueError("smoothing window must be odd and >= 1")
    if window > len(stream.samples):
        raise ValueError("smoothing window larger than stream")
    if window == 1:
        return stream
    half = window // 2
    samples = stream.samples
    smoothed: List[GazeSample] = []
    for i, s in enumerate(samples):
        if not s.valid:
            smoothed.append(s)
            continue
        lo = max(0, i - half)
        hi = min(len(samples), i + half + 1)
        xs = [w.x for w in samples[lo:hi] if w.valid]
        ys = [w.y for w in samples[lo:hi] if w.valid]
        smoothed.append(replace(s, x=statistics.median(xs), y=statistics.median(ys)))
    return GazeStream(
        participant_id=stream.participant_id,
        method_id=stream.method_id,
        sampling_rate_hz=stream.sampling_rate_hz,
        samples=smoothed,
    )


def angular_velocity(stream: GazeStream, geom: ScreenGeometry) -> List[Optional[float]]:
    """Per-pair angular velocities in deg/s.

    Entry i covers samples (i, i+1); pairs touching an invalid sample are
    None. Fewer than two valid samples yields an empty list.
    """
    if sum(1 for s in stream.samples if s.valid) < 2:
        return []
    out: List[Optional[float]] = []
    for a, b in zip(stream.samples, stream.samples[1:]):
        if not (a.valid and b.valid):
            out.append(None)
            continue
        dt_s = (b.t_us - a.t_us) / 1e6
        angle = visual_angle_deg(b.x - a.x, b.y - a.y, geom)
        out.append(angle / dt_s)
    return out


def ivt_classify(stream: GazeStream, cfg: FilterConfig, geom: ScreenGeometry) -> List[Fixation]:
    """Velocity-threshold classification of a (smoothed) stream.

    Maximal runs of consecutive valid samples whose inter-sample velocities
    all stay below the threshold become fixation candidates; candidates
    shorter than the minimum duration are dropped.
    """
    samples = stream.samples
    velocities = angular_velocity(stream, geom)
    fixations: List[Fixation] = []
    run: List[GazeSample] = []

    def flush() -> None:
        if not run:
            return
        duration_ms = (run[-1].t_us - run[0].t_us) / 1e3
        if duration_ms >= cfg.min_fixation_duration_ms:
            fixations.append(
                Fixation(
                    t_start_us=run[0].t_us,
                    t_end_us=run[-1].t_us,
                    centroid_x=sum(s.x for s in run) / len(run),
                    centroid_y=sum(s.y for s in run) / len(run),
                    sample_count=len(run),
                )
            )
        run.clear()

    for i, s in enumerate(samples):
        if not s.valid:
            flush()
            continue
        if run:
            v = velocities[i - 1] if velocities else None
            if v is None or v >= cfg.velocity_threshold_deg_s:
                flush()
        run.append(s)
    flush()
    return fixations


def merge_fixations(
    fixations: List[Fixation], cfg: FilterConfig, geom: ScreenGeometry
) -> List[Fixation]:
    """Merge temporally and spatially adjacent fixations to a fixed point.

    Consecutive fixations closer than merge_max_gap_ms in time and
    merge_max_dist_deg in visual angle collapse into one fixation with a
    duration-weighted centroid and the union time span.
    """
    for a, b in zip(fixations, fixations[1:]):
        if b.t_start_us < a.t_start_us:
            raise ValueError("fixations must be ordered by t_start_us")
    current = list(fixations)
    while True:
        merged: List[Fixation] = []
        changed = False
        for fix in current:
            if merged:
                prev = merged[-1]
                gap_ms = (fix.t_start_us - prev.t_end_us) / 1e3
                dist_deg = visual_angle_deg(
                    fix.centroid_x - prev.centroid_x, fix.centroid_y - prev.centroid_y, geom
                )
                if gap_ms <= cfg.merge_max_gap_ms and dist_deg <= cfg.merge_max_dist_deg:
                    w_prev = max(prev.t_end_us - prev.t_start_us, 1)
                    w_fix = max(fix.t_end_us - fix.t_start_us, 1)
                    total = w_prev + w_fix
                    merged[-1] = Fixation(
                        t_start_us=prev.t_start_us,
                        t_end_us=fix.t_end_us,
                        centroid_x=(prev.centroid_x * w_prev + fix.centroid_x * w_fix) / total,
                        centroid_y=(prev.centroid_y * w_prev + fix.centroid_y * w_fix) / total,
                        sample_count=prev.sample_count + fix.sample_count,
                    )
                    changed = True
                    continue
            merged.append(fix)
        current = merged
        if not changed:
            return current


def detect_fixations(
    stream: GazeStream, cfg: FilterConfig, geom: ScreenGeometry
) -> List[Fixation]:
    """Full per-trial pipeline: median smoothing, I-VT, merging."""
    if not stream.samples:
        return []
    window = min(cfg.smoothing_window_samples, len(stream.samples))
    if window % 2 == 0:
        window -= 1
    smoothed = low_pass(stream, window)
    return merge_fixations(ivt_classify(smoothed, cfg, geom), cfg, geom)
