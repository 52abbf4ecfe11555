from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gazepath.gaze_ingest import DEFAULT_SCREEN
from gazepath.stimulus import CodePane, build_layout

# The method shown in the study's example fine-tuning prompt.
FIG3_SOURCE = (
    "public void  testNegativeParseCases() {\n"
    '    verbose("--->Negative parse tests  START");\n'
    "    for (int i = 0; i < negativeParseTests.length; i++) {\n"
    "      parseFilter(negativeParseTests[i], false);\n"
    "    }\n"
    "    checkDelete(); }"
)

FIG3_METHOD_ID = "31696447"
FIG3_PARTICIPANT_ID = "133"


@pytest.fixture(scope="session")
def geom():
    return DEFAULT_SCREEN


@pytest.fixture(scope="session")
def pane():
    return CodePane()


@pytest.fixture(scope="session")
def fig3_layout(pane):
    return build_layout(FIG3_METHOD_ID, FIG3_SOURCE, pane)
