import sys
from functools import lru_cache
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ehaoi.harness.experiments import solve  # noqa: E402
from ehaoi.model import ModelParams  # noqa: E402

BASELINE = dict(pe=0.8, ps=0.8, p01=0.1, p10=0.2, e_max=5, d_max0=10, d_max1=10, gamma=0.99)
SMALL = dict(pe=0.8, ps=0.8, p01=0.1, p10=0.2, e_max=2, d_max0=3, d_max1=3, gamma=0.99)


def params(**overrides) -> ModelParams:
    return ModelParams(**{**BASELINE, **overrides})


@lru_cache(maxsize=None)
def solved(**overrides):
    return solve(params(**overrides))


@pytest.fixture(scope="session")
def baseline():
    return params()


@pytest.fixture(scope="session")
def small():
    return ModelParams(**SMALL)


@pytest.fixture(scope="session")
def baseline_solution():
    return solved()


_criteria_lines: list[str] = []


@pytest.fixture
def report_criterion():
    def record(number: int, passed: bool, detail: str) -> None:
        _criteria_lines.append(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}")
        print(_criteria_lines[-1])

    return record


def pytest_terminal_summary(terminalreporter):
    if _criteria_lines:
        terminalreporter.section("acceptance criteria")
        for line in _criteria_lines:
            terminalreporter.write_line(line)
