import math
import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from immortrack.geometry import Box3D  # noqa: E402


def box_strategy(center=3.0, dim=(0.5, 5.0)):
    coord = st.floats(-center, center, allow_nan=False)
    size = st.floats(*dim, allow_nan=False)
    return st.builds(
        Box3D,
        x=coord,
        y=coord,
        z=st.floats(-1.0, 1.0),
        yaw=st.floats(-math.pi, math.pi),
        l=size,
        w=size,
        h=size,
    )


@pytest.fixture
def car():
    return Box3D(0.0, 0.0, 0.8, 0.0, 4.5, 2.0, 1.6)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS):
        ok, detail = RESULTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
