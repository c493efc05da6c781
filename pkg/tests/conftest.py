"""Shared fixtures: expensive equilibrium solutions are built once per session."""
from __future__ import annotations

import functools

import pytest

from cornervoid.equilibrium import EquilibriumProblem, continuation_in_lambda
from cornervoid.params import PhysicalParams
from cornervoid.surface_energy import wulff_corner_angle

EPS = 0.08
ACCEPTANCE_LINES: list[str] = []


@functools.lru_cache(maxsize=None)
def stressed_solution(Lambda: float, N: int, steps: int = 3, chi: float = 0.0):
    a0 = wulff_corner_angle(EPS)
    problem = EquilibriumProblem(PhysicalParams(epsilon=EPS, chi=chi), (a0, a0), N)
    return continuation_in_lambda(problem, Lambda, steps)


@pytest.fixture(scope="session")
def alpha0():
    return wulff_corner_angle(EPS)


@pytest.fixture(scope="session")
def sol_015_32():
    return stressed_solution(0.15, 32)


@pytest.fixture(scope="session")
def sol_015_64():
    return stressed_solution(0.15, 64)


@pytest.fixture(scope="session")
def sol_03_32():
    return stressed_solution(0.3, 32, 6)


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""
    def record(number: int, title: str, passed: bool, detail: str = "") -> bool:
        flag = "PASS" if passed else "FAIL"
        ACCEPTANCE_LINES.append(f"[{flag}] criterion {number}: {title}"
                                + (f" ({detail})" if detail else ""))
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES,
                           key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
