"""Experiment configuration: one INI file holds every tunable parameter.

Every number the pipeline uses that is not derivable from the data lives
here, so a replication with different apparatus or filter settings needs
no code change. All sections and keys are optional; omitted values fall
back to the defaults below.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path
from typing import List

from .dataset import SPLIT_KINDS
from .fixation import FilterConfig
from .gaze_ingest import DEFAULT_SCREEN, ScreenGeometry
from .scanpath import DEFAULT_TOLERANCE_DEG
from .stimulus import CodePane
from .synth import SynthConfig


@dataclass
class SynthCorpusConfig:
    """Shape of the synthetic study the `synth` command generates."""

    participants: int = 27
    methods_per_participant: int = 25
    method_count: int = 68
    script_len: int = 6
    synth: SynthConfig = field(default_factory=SynthConfig)


@dataclass
class ExperimentConfig:
    corpus_path: Path = Path("methods.jsonl")
    gaze_path: Path = Path("gaze.jsonl")
    output_dir: Path = Path("out")
    screen: ScreenGeometry = DEFAULT_SCREEN
    pane: CodePane = field(default_factory=CodePane)
    filter: FilterConfig = field(default_factory=FilterConfig)
    tolerance_deg: float = DEFAULT_TOLERANCE_DEG
    n_values: List[int] = field(default_factory=lambda: [1, 2, 3, 4])
    split_kinds: List[str] = field(default_factory=lambda: list(SPLIT_KINDS))
    synth_corpus: SynthCorpusConfig = field(default_factory=SynthCorpusConfig)

    def __post_init__(self) -> None:
        if not self.n_values or any(n < 1 for n in self.n_values):
            raise ValueError("n_values must be non-empty with every n >= 1")
        for kind in self.split_kinds:
            if kind not in SPLIT_KINDS:
                raise ValueError(f"unknown split kind {kind!r}")


def _get(parser: configparser.ConfigParser, section: str, key: str, cast, default):
    if parser.has_option(section, key):
        raw = parser.get(section, key)
        if cast is bool:
            return parser.getboolean(section, key)
        return cast(raw)
    return default


def load_config(path: str | Path | None) -> ExperimentConfig:
    """Read an INI experiment config; a missing path yields pure defaults."""
    parser = configparser.ConfigParser()
    if path is not None:
        read = parser.read(Path(path))
        if not read:
            raise FileNotFoundError(f"config file not found: {path}")

    g = lambda s, k, cast, d: _get(parser, s, k, cast, d)  # noqa: E731

    screen = ScreenGeometry(
        width_px=g("screen", "width_px", int, DEFAULT_SCREEN.width_px),
        height_px=g("screen", "height_px", int, DEFAULT_SCREEN.height_px),
        width_mm=g("screen", "width_mm", float, DEFAULT_SCREEN.width_mm),
        height_mm=g("screen", "height_mm", float, DEFAULT_SCREEN.height_mm),
        viewer_distance_mm=g(
            "screen", "viewer_distance_mm", float, DEFAULT_SCREEN.viewer_distance_mm
        ),
    )
    pane = CodePane(
        origin_x_px=g("pane", "origin_x_px", float, 64.0),
        origin_y_px=g("pane", "origin_y_px", float, 64.0),
        cell_w_px=g("pane", "cell_w_px", float, 10.0),
        cell_h_px=g("pane", "cell_h_px", float, 21.0),
        tab_width=g("pane", "tab_width", int, 4),
    )
    filt = FilterConfig(
        smoothing_window_samples=g("filter", "smoothing_window_samples", int, 3),
        velocity_threshold_deg_s=g("filter", "velocity_threshold_deg_s", float, 30.0),
        min_fixation_duration_ms=g("filter", "min_fixation_duration_ms", float, 100.0),
        merge_max_gap_ms=g("filter", "merge_max_gap_ms", float, 75.0),
        merge_max_dist_deg=g("filter", "merge_max_dist_deg", float, 0.7),
    )
    synth = SynthConfig(
        sampling_rate_hz=g("synth", "sampling_rate_hz", float, 60.0),
        dwell_ms_per_token=g("synth", "dwell_ms_per_token", float, 300.0),
        saccade_ms=g("synth", "saccade_ms", float, 0.0),
        noise_sd_norm=g("synth", "noise_sd_norm", float, 0.0),
        seed=g("synth", "seed", int, 0),
    )
    synth_corpus = SynthCorpusConfig(
        participants=g("synth", "participants", int, 27),
        methods_per_participant=g("synth", "methods_per_participant", int, 25),
        method_count=g("synth", "method_count", int, 68),
        script_len=g("synth", "script_len", int, 6),
        synth=synth,
    )
    n_values = [
        int(v) for v in str(g("eval", "n_values", str, "1,2,3,4")).split(",") if v.strip()
    ]
    split_kinds = [
        v.strip()
        for v in str(g("eval", "split_kinds", str, ",".join(SPLIT_KINDS))).split(",")
        if v.strip()
    ]
    return ExperimentConfig(
        corpus_path=Path(g("paths", "corpus", str, "methods.jsonl")),
        gaze_path=Path(g("paths", "gaze", str, "gaze.jsonl")),
        output_dir=Path(g("paths", "output", str, "out")),
        screen=screen,
        pane=pane,
        filter=filt,
        tolerance_deg=g("scanpath", "tolerance_deg", float, DEFAULT_TOLERANCE_DEG),
        n_values=n_values,
        split_kinds=split_kinds,
        synth_corpus=synth_corpus,
    )
