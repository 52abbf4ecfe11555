"""Fixation-to-token mapping and scanpath extraction.

A scanpath is the ordered sequence of token lexemes a participant fixated
over one method. Fixations landing on whitespace or punctuation snap to
the nearest substantive token within a visual-angle tolerance; consecutive
repeats collapse to one word.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .fixation import Fixation
from .gaze_ingest import ScreenGeometry
from .stimulus import KIND_PUNCTUATION, StimulusLayout, Token

log = logging.getLogger(__name__)

DEFAULT_TOLERANCE_DEG = 0.7


@dataclass(frozen=True)
class Scanpath:
    participant_id: str
    method_id: str
    words: Tuple[str, ...]


def _px_distance_deg(dx_px: float, dy_px: float, geom: ScreenGeometry) -> float:
    dx_mm = dx_px * geom.width_mm / geom.width_px
    dy_mm = dy_px * geom.height_mm / geom.height_px
    dist_mm = math.hypot(dx_mm, dy_mm)
    return math.degrees(2.0 * math.atan2(dist_mm / 2.0, geom.viewer_distance_mm))


def map_fixation(
    fix: Fixation,
    layout: StimulusLayout,
    geom: ScreenGeometry,
    tolerance_deg: float = DEFAULT_TOLERANCE_DEG,
) -> Optional[Token]:
    """Resolve a fixation centroid to a token, or None if nothing is close.

    Containment in a non-punctuation token wins outright; otherwise
    (whitespace or punctuation hit) the nearest non-punctuation token by
    bbox-center distance is returned when within tolerance_deg.
    """
    if tolerance_deg < 0:
        raise ValueError("tolerance_deg must be >= 0")
    px = fix.centroid_x * geom.width_px
    py = fix.centroid_y * geom.height_px
    for token in layout.tokens:
        x0, y0, x1, y1 = token.bbox
        if x0 <= px < x1 and y0 <= py < y1 and token.kind != KIND_PUNCTUATION:
            return token
    best: Optional[Token] = None
    best_deg = math.inf
    for token in layout.tokens:
        if token.kind == KIND_PUNCTUATION:
            continue
        cx, cy = token.center_px
        deg = _px_distance_deg(px - cx, py - cy, geom)
        if deg < best_deg:
            best, best_deg = token, deg
    if best is not None and best_deg <= tolerance_deg:
        return best
    return None


def extract_scanpath(
    fixations: List[Fixation],
    layout: StimulusLayout,
    geom: ScreenGeometry,
    participant_id: str,
    tolerance_deg: float = DEFAULT_TOLERANCE_DEG,
) -> Scanpath:
    """Map time-ordered fixations to words, collapsing consecutive repeats."""
    words: List[str] = []
    for fix in fixations:
        token = map_fixation(fix, layout, geom, tolerance_deg)
        if token is None:
            continue
        if words and words[-1] == token.lexeme:
            continue
        words.append(token.lexeme)
    if fixations and not words:
        log.warning(
            "no mappable fixation for participant=%s method=%s",
            participant_id,
            layout.method_id,
        )
    return Scanpath(
        participant_id=participant_id, method_id=layout.method_id, words=tuple(words)
    )


def first_n(scanpath: Scanpath, n: int) -> List[str]:
    """First min(n, length) words; shorter scanpaths come back whole."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return list(scanpath.words[:n])
