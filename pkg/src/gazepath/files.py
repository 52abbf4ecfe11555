"""JSONL readers and writers for the pipeline's on-disk formats.

Formats: method corpus ({"method_id", "source"}), fixations (header line
plus one fixation per line), scanpaths, predictions, and token layout
dumps for debugging overlays. All files are UTF-8 with LF line endings.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Dict, Iterable, List, Tuple

from .fixation import Fixation
from .gaze_ingest import GazeFileHeader, ScreenGeometry
from .scanpath import Scanpath
from .stimulus import CodePane, StimulusLayout, build_layout


def read_method_corpus(path: str | Path) -> Dict[str, str]:
    """method_id -> source, preserving file order via insertion order."""
    sources: Dict[str, str] = {}
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            sources[str(rec["method_id"])] = str(rec["source"])
    return sources


def write_method_corpus(path: str | Path, sources: Dict[str, str]) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for method_id in sorted(sources):
            fh.write(json.dumps({"method_id": method_id, "source": sources[method_id]}) + "\n")


def build_layouts(sources: Dict[str, str], pane: CodePane) -> Dict[str, StimulusLayout]:
    return {mid: build_layout(mid, src, pane) for mid, src in sources.items()}


def write_fixations(
    path: str | Path,
    header: GazeFileHeader,
    fixations_by_trial: Iterable[Tuple[Tuple[str, str], List[Fixation]]],
) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
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
        for (participant_id, method_id), fixations in fixations_by_trial:
            for f in fixations:
                fh.write(
                    json.dumps(
                        {
                            "participant_id": participant_id,
                            "method_id": method_id,
                            "t_start_us": f.t_start_us,
                            "t_end_us": f.t_end_us,
                            "x": f.centroid_x,
                            "y": f.centroid_y,
                            "sample_count": f.sample_count,
                        }
                    )
                    + "\n"
                )


def read_fixations(
    path: str | Path,
) -> Tuple[GazeFileHeader, Dict[Tuple[str, str], List[Fixation]]]:
    header: GazeFileHeader | None = None
    trials: Dict[Tuple[str, str], List[Fixation]] = {}
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            if "header" in rec:
                h = rec["header"]
                header = GazeFileHeader(
                    sampling_rate_hz=float(h["sampling_rate_hz"]),
                    screen=ScreenGeometry.from_dict(h["screen"]),
                )
                continue
            key = (str(rec["participant_id"]), str(rec["method_id"]))
            trials.setdefault(key, []).append(
                Fixation(
                    t_start_us=int(rec["t_start_us"]),
                    t_end_us=int(rec["t_end_us"]),
                    centroid_x=float(rec["x"]),
                    centroid_y=float(rec["y"]),
                    sample_count=int(rec["sample_count"]),
                )
            )
    if header is None:
        raise ValueError(f"{path}: missing fixation file header")
    return header, trials


def write_scanpaths(path: str | Path, scanpaths: Iterable[Scanpath]) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for sp in scanpaths:
            fh.write(
                json.dumps(
                    {
                        "participant_id": sp.participant_id,
                        "method_id": sp.method_id,
                        "words": list(sp.words),
                    }
                )
                + "\n"
            )


def read_scanpaths(path: str | Path) -> List[Scanpath]:
    out: List[Scanpath] = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            out.append(
                Scanpath(
                    participant_id=str(rec["participant_id"]),
                    method_id=str(rec["method_id"]),
                    words=tuple(rec["words"]),
                )
            )
    return out


def write_predictions(path: str | Path, records: Iterable) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(
                json.dumps(
                    {
                        "participant_id": rec.participant_id,
                        "method_id": rec.method_id,
                        "n": rec.n,
                        "words": list(rec.words),
                    }
                )
                + "\n"
            )


def write_layout_dump(path: str | Path, layout: StimulusLayout) -> None:
    """One token per line with its bbox, for visual overlay debugging."""
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for t in layout.tokens:
            fh.write(
                json.dumps(
                    {
                        "method_id": layout.method_id,
                        "lexeme": t.lexeme,
                        "kind": t.kind,
                        "line": t.line,
                        "col_start": t.col_start,
                        "col_end": t.col_end,
                        "bbox": list(t.bbox),
                    }
                )
                + "\n"
            )
