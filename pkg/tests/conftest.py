import numpy as np
import pytest

from tangent_arctic.profile import AlphaProfile

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def gap_profile():
    # slope 2 on [0, 1/2] up to 1, jump of 1, slope 2 on [1/2, 1] up to 3
    return AlphaProfile.build([0.5, 0.5], [2, 2], [1.0])


@pytest.fixture
def saw_profile():
    # thirds with slopes 2, 1, 2: alpha runs 0 -> 2/3 -> 1 -> 5/3
    return AlphaProfile.build([1, 1, 1], [2, 1, 2])


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def report():
    def _report(number: int, passed: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}"
        print(line)
        ACCEPTANCE_LINES.append(line)
    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
