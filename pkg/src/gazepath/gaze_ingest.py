"""Loading and validation of raw gaze-sample streams.

File format is a vendor-neutral JSONL: the first line is a header carrying
the sampling rate and screen geometry, every following line is one gaze
sample keyed by (participant_id, method_id). Coordinates are normalized
display coordinates in [0, 1]; invalid samples are kept so downstream
filtering can treat gaps explicitly.
"""
from __future__ import annotations

import json
import logging
import math
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List

log = logging.getLogger(__name__)


class GazeFormatError(ValueError):
    """Raised for malformed or out-of-contract gaze files."""


@dataclass(frozen=True)
class ScreenGeometry:
    """Physical and pixel dimensions of the display plus viewer distance."""

    width_px: int
    height_px: int
    width_mm: float
    height_mm: float
    viewer_distance_mm: float

    def __post_init__(self) -> None:
        for name in ("width_px", "height_px", "width_mm", "height_mm", "viewer_distance_mm"):
            if getattr(self, name) <= 0:
                raise ValueError(f"ScreenGeometry.{name} must be strictly positive")
        px_ratio = self.width_px / self.height_px
        mm_ratio = self.width_mm / self.height_mm
        if abs(px_ratio - mm_ratio) / mm_ratio > 0.05:
            log.warning(
                "screen aspect ratio mismatch: %.3f (px) vs %.3f (mm)", px_ratio, mm_ratio
            )

    def to_dict(self) -> dict:
        return {
            "width_px": self.width_px,
            "height_px": self.height_px,
            "width_mm": self.width_mm,
            "height_mm": self.height_mm,
            "viewer_distance_mm": self.viewer_distance_mm,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScreenGeometry":
        return cls(
            width_px=int(d["width_px"]),
            height_px=int(d["height_px"]),
            width_mm=float(d["width_mm"]),
            height_mm=float(d["height_mm"]),
            viewer_distance_mm=float(d["viewer_distance_mm"]),
        )


#: 24" 16:9 monitor at 1920x1080, viewer at 650 mm.
DEFAULT_SCREEN = ScreenGeometry(
    width_px=1920, height_px=1080, width_mm=531.0, height_mm=299.0, viewer_distance_mm=650.0
)


@dataclass(frozen=True)
class GazeSample:
    t_us: int
    x: float
    y: float
    valid: bool


@dataclass
class GazeStream:
    """All samples of one (participant, method) trial, time ordered."""

    participant_id: str
    method_id: str
    sampling_rate_hz: float
    samples: List[GazeSample] = field(default_factory=list)

    @property
    def key(self) -> tuple:
        return (self.participant_id, self.method_id)

    def duration_s(self) -> float:
        if len(self.samples) < 2:
            return 0.0
        return (self.samples[-1].t_us - self.samples[0].t_us) / 1e6


@dataclass(frozen=True)
class GazeFileHeader:
    sampling_rate_hz: float
    screen: ScreenGeometry


def _check_sample(rec: dict, line_no: int) -> GazeSample:
    try:
        t_us = int(rec["t_us"])
        x = float(rec["x"])
        y = float(rec["y"])
        valid = bool(rec["valid"])
    except (KeyError, TypeError, ValueError) as exc:
        raise GazeFormatError(f"line {line_no}: bad gaze record: {exc}") from exc
    if valid:
        if not (math.isfinite(x) and math.isfinite(y)):
            raise GazeFormatError(f"line {line_no}: valid sample with non-finite coordinates")
        if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
            raise GazeFormatError(f"line {line_no}: valid sample with coordinates outside [0,1]")
    return GazeSample(t_us=t_us, x=x, y=y, valid=valid)


def load_gaze_file(path: str | Path) -> tuple[GazeFileHeader, List[GazeStream]]:
    """Parse a gaze JSONL file into its header and per-trial streams.

    Streams are grouped by (participant_id, method_id) in first-appearance
    order; per-trial timestamps must be strictly increasing as written.
    """
    path = Path(path)
    header: GazeFileHeader | None = None
    streams: dict[tuple, GazeStream] = {}
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise GazeFormatError(f"line {line_no}: malformed JSON: {exc}") from exc
            if "header" in rec:
                if line_no != 1:
                    raise GazeFormatError(f"line {line_no}: header allowed only on line 1")
                h = rec["header"]
                header = GazeFileHeader(
                    sampling_rate_hz=float(h["sampling_rate_hz"]),
                    screen=ScreenGeometry.from_dict(h["screen"]),
                )
                if header.sampling_rate_hz <= 0:
                    raise GazeFormatError("header sampling_rate_hz must be > 0")
                continue
            if header is None:
                raise GazeFormatError("first line must be the file header")
            try:
                key = (str(rec["participant_id"]), str(rec["method_id"]))
            except KeyError as exc:
                raise GazeFormatError(f"line {line_no}: missing trial key: {exc}") from exc
            sample = _check_sample(rec, line_no)
            stream = streams.get(key)
            if stream is None:
                stream = GazeStream(
                    participant_id=key[0],
                    method_id=key[1],
                    sampling_rate_hz=header.sampling_rate_hz,
                )
                streams[key] = stream
            if stream.samples and sample.t_us <= stream.samples[-1].t_us:
                raise GazeFormatError(
                    f"line {line_no}: non-monotonic timestamps in trial "
                    f"participant={key[0]} method={key[1]}"
                )
            stream.samples.append(sample)
    if header is None:
        raise GazeFormatError(f"{path}: empty gaze file (missing header)")
    return header, list(streams.values())


def load_gaze_streams(path: str | Path) -> List[GazeStream]:
    """Load a gaze JSONL file, returning every trial stream it contains."""
    return load_gaze_file(path)[1]


def validate_stream(stream: GazeStream) -> List[str]:
    """Return human-readable warnings for suspicious streams; never mutates."""
    warnings: List[str] = []
    who = f"trial participant={stream.participant_id} method={stream.method_id}"
    valid = [s for s in stream.samples if s.valid]
    if stream.samples and len(valid) / len(stream.samples) < 0.5:
        warnings.append(f"{who}: mostly-invalid ({len(stream.samples) - len(valid)} of {len(stream.samples)} samples invalid)")
    if stream.duration_s() < 1.0:
        warnings.append(f"{who}: trial shorter than 1 s ({stream.duration_s():.3f} s)")
    if len(stream.samples) >= 2:
        gaps = [b.t_us - a.t_us for a, b in zip(stream.samples, stream.samples[1:])]
        median_gap_us = statistics.median(gaps)
        expected_gap_us = 1e6 / stream.sampling_rate_hz
        if median_gap_us > 0 and abs(median_gap_us - expected_gap_us) / expected_gap_us > 0.2:
            observed_hz = 1e6 / median_gap_us
            warnings.append(
                f"{who}: rate-mismatch (declared {stream.sampling_rate_hz:g} Hz, "
                f"observed ~{observed_hz:.1f} Hz)"
            )
    return warnings


def write_gaze_file(
    path: str | Path, header: GazeFileHeader, streams: Iterable[GazeStream]
) -> None:
    """Serialize streams back to the gaze JSONL format (header first)."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(
            json.dumps(
                {
                    "header": {
                        "sampling_rate_hz": header.sampling_rate_hz,
                        "screen": header.screen.to_dict(),
                    }
                }
            )
            + "\n"
        )
        for stream in streams:
            for s in stream.samples:
                fh.write(
                    json.dumps(
                        {
                            "participant_id": stream.participant_id,
                            "method_id": stream.method_id,
                            "t_us": s.t_us,
                            "x": s.x,
                            "y": s.y,
                            "valid": s.valid,
                        }
                    )
                    + "\n"
                )
