"""Shared fixtures: a unit line and a two-component positions space."""
from __future__ import annotations

from fractions import Fraction

import pytest

from naivea.chains import InstanceParams
from naivea.space import build_space

ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Recorder for acceptance results, echoed in the terminal summary."""

    def record(line):
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def l10():
    """Ten points on the integer line, unit spacing."""
    ids = [f"p{i}" for i in range(10)]
    return build_space(ids, {"type": "positions", "values": {p: i for i, p in enumerate(ids)}})


@pytest.fixture
def two():
    """Two components 100 apart: q2 < q1 < q0 at -2..0 and r0 < r1 < r2 at 100..102."""
    values = {"q0": 0, "q1": -1, "q2": -2, "r0": 100, "r1": 101, "r2": 102}
    return build_space(sorted(values), {"type": "positions", "values": values})


@pytest.fixture
def two_params():
    # S=2 keeps the q and r groups S-connected internally and far apart
    return InstanceParams(R=Fraction(1), epsilon=Fraction(1), S=Fraction(2), L=3, N=11)
