import os
from pathlib import Path

import numpy as np
import pytest

from rpreg.synthetic import write_fixtures

ACCEPTANCE_LINES = {}


def record_acceptance(number: int, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES[number] = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
    print(ACCEPTANCE_LINES[number])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])


@pytest.fixture(scope="session")
def fixture_paths(tmp_path_factory):
    repo = Path(__file__).resolve().parent.parent / "fixtures"
    names = ("texture_rgb", "texture_gray", "gradient", "noise_a", "noise_b")
    if all((repo / f"{n}.png").exists() for n in names) and os.access(repo, os.R_OK):
        return {n: repo / f"{n}.png" for n in names}
    return write_fixtures(tmp_path_factory.mktemp("fixtures"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
