from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import support


@pytest.fixture
def trip():
    return support.trip_booking()


@pytest.fixture
def joint():
    return support.joint_escalation()
