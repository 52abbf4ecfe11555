"""Toolkit for turning gaze recordings over source code into token-level
scanpaths, leave-one-out fine-tuning datasets, and similarity reports."""

from .fixation import FilterConfig, Fixation, detect_fixations
from .gaze_ingest import DEFAULT_SCREEN, GazeSample, GazeStream, ScreenGeometry
from .scanpath import Scanpath, extract_scanpath, first_n
from .stimulus import CodePane, StimulusLayout, Token, build_layout, tokenize_java

__all__ = [
    "CodePane",
    "DEFAULT_SCREEN",
    "FilterConfig",
    "Fixation",
    "GazeSample",
    "GazeStream",
    "Scanpath",
    "ScreenGeometry",
    "StimulusLayout",
    "Token",
    "build_layout",
    "detect_fixations",
    "extract_scanpath",
    "first_n",
    "tokenize_java",
]

__version__ = "0.1.0"
