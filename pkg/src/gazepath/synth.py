"""Synthetic gaze generation from scripted token sequences.

Given a stimulus layout and a script of token indices, emits a gaze stream
of jittered dwells at the scripted token centers joined by fast jumps, so
the full fixation/scanpath pipeline is testable without human recordings.
Generation asserts that every inter-dwell jump exceeds the default I-VT
velocity threshold, otherwise the script is not recoverable by design.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from .fixation import visual_angle_deg
from .gaze_ingest import GazeSample, GazeStream, ScreenGeometry
from .stimulus import KIND_PUNCTUATION, StimulusLayout, Token, build_layout, CodePane


@dataclass(frozen=True)
class SynthConfig:
    sampling_rate_hz: float = 60.0
    dwell_ms_per_token: float = 300.0
    saccade_ms: float = 0.0
    noise_sd_norm: float = 0.0
    seed: int = 0
    #: jumps slower than this are rejected at generation time
    min_saccade_velocity_deg_s: float = 30.0

    def __post_init__(self) -> None:
        if self.dwell_ms_per_token < 100.0:
            raise ValueError("dwell_ms_per_token must cover at least one fixation (100 ms)")
        if self.noise_sd_norm < 0:
            raise ValueError("noise_sd_norm must be >= 0")
        if self.sampling_rate_hz <= 0:
            raise ValueError("sampling_rate_hz must be > 0")


def _token_center_norm(token: Token, geom: ScreenGeometry) -> tuple:
    cx, cy = token.center_px
    return (cx / geom.width_px, cy / geom.height_px)


def generate(
    layout: StimulusLayout,
    script: Sequence[int],
    cfg: SynthConfig,
    geom: ScreenGeometry,
    participant_id: str = "synth",
) -> GazeStream:
    """Render a scripted token sequence as a timestamped gaze stream."""
    for idx in script:
        if not 0 <= idx < len(layout.tokens):
            raise IndexError(f"script index {idx} out of range for layout")
    step_us = round(1e6 / cfg.sampling_rate_hz)
    dwell_samples = round(cfg.dwell_ms_per_token * 1000 / step_us)
    if dwell_samples < 1:
        raise ValueError("dwell shorter than one sample period")
    saccade_samples = round(cfg.saccade_ms * 1000 / step_us)
    rng = np.random.default_rng(cfg.seed)

    centers = [_token_center_norm(layout.tokens[i], geom) for i in script]
    points: List[tuple] = []
    for k, (cx, cy) in enumerate(centers):
        for _ in range(dwell_samples):
            x = cx + (rng.normal(0.0, cfg.noise_sd_norm) if cfg.noise_sd_norm else 0.0)
            y = cy + (rng.normal(0.0, cfg.noise_sd_norm) if cfg.noise_sd_norm else 0.0)
            points.append((min(max(x, 0.0), 1.0), min(max(y, 0.0), 1.0)))
        if k + 1 < len(centers) and saccade_samples > 0:
            nx, ny = centers[k + 1]
            for s in range(1, saccade_samples + 1):
                f = s / (saccade_samples + 1)
                points.append((cx + (nx - cx) * f, cy + (ny - cy) * f))

    samples = [
        GazeSample(t_us=i * step_us, x=x, y=y, valid=True) for i, (x, y) in enumerate(points)
    ]
    stream = GazeStream(
        participant_id=participant_id,
        method_id=layout.method_id,
        sampling_rate_hz=cfg.sampling_rate_hz,
        samples=samples,
    )
    _assert_saccade_velocities(centers, step_us, saccade_samples, cfg, geom)
    return stream


def _assert_saccade_velocities(
    centers: List[tuple],
    step_us: int,
    saccade_samples: int,
    cfg: SynthConfig,
    geom: ScreenGeometry,
) -> None:
    """Every inter-dwell jump must beat the I-VT threshold, per step."""
    dt_s = step_us / 1e6
    for (ax, ay), (bx, by) in zip(centers, centers[1:]):
        total_deg = visual_angle_deg(bx - ax, by - ay, geom)
        step_deg = total_deg / (saccade_samples + 1)
        velocity = step_deg / dt_s
        if velocity <= cfg.min_saccade_velocity_deg_s:
            raise ValueError(
                f"scripted jump of {total_deg:.2f} deg yields {velocity:.1f} deg/s, "
                f"below the {cfg.min_saccade_velocity_deg_s:g} deg/s threshold; "
                "space scripted tokens further apart or shorten the saccade"
            )


def random_script(
    layout: StimulusLayout,
    length: int,
    rng: np.random.Generator,
    geom: ScreenGeometry,
    min_separation_deg: float = 0.8,
) -> List[int]:
    """Random non-punctuation token script with separable consecutive jumps.

    Consecutive picks keep distinct lexemes and at least min_separation_deg
    of visual angle between centers so zero-noise recovery is well defined.
    """
    candidates = [
        i for i, t in enumerate(layout.tokens) if t.kind != KIND_PUNCTUATION
    ]
    if not candidates:
        raise ValueError("layout has no substantive tokens")
    script: List[int] = []
    guard = 0
    while len(script) < length and guard < length * 200:
        guard += 1
        idx = int(rng.choice(candidates))
        if script:
            prev = layout.tokens[script[-1]]
            cur = layout.tokens[idx]
            if cur.lexeme == prev.lexeme:
                continue
            (px, py), (cx, cy) = prev.center_px, cur.center_px
            sep = visual_angle_deg(
                (cx - px) / geom.width_px * 1.0, (cy - py) / geom.height_px * 1.0, geom
            )
            if sep < min_separation_deg:
                continue
        script.append(idx)
    if len(script) < length:
        raise ValueError("could not build a separable script for this layout")
    return script


_METHOD_TEMPLATE = """public {ret} {name}({params}) {{
    int total = {init};
    for (int i = 0; i < {bound}; i++) {{
        total += compute{tag}(i, {factor});
    }}
    if (total > {limit}) {{
        log.warn("{name} exceeded limit");
        return {fallback};
    }}
    return {result};
}}"""


def demo_method_sources(count: int, seed: int = 7) -> dict:
    """Deterministic corpus of plausible Java methods keyed by method_id."""
    rng = np.random.default_rng(seed)
    verbs = ["parse", "build", "check", "merge", "scan", "load", "fill", "trim"]
    nouns = ["Filter", "Buffer", "Record", "Index", "Header", "Token", "Block", "Cache"]
    sources = {}
    for k in range(count):
        verb = verbs[int(rng.integers(len(verbs)))]
        noun = nouns[int(rng.integers(len(nouns)))]
        name = f"{verb}{noun}{k}"
        source = _METHOD_TEMPLATE.format(
            ret="int",
            name=name,
            params="int count, boolean strict",
            init=int(rng.integers(0, 10)),
            bound="count",
            tag=noun,
            factor=int(rng.integers(2, 9)),
            limit=int(rng.integers(100, 999)),
            fallback=-1,
            result="total",
        )
        sources[f"m{k:03d}"] = source
    return sources


def demo_layouts(count: int, pane: CodePane, seed: int = 7) -> dict:
    """Lay out the demo corpus; returns method_id -> StimulusLayout."""
    return {
        mid: build_layout(mid, src, pane) for mid, src in demo_method_sources(count, seed).items()
    }
