import math

import pytest

HALF_PI = 0.5 * math.pi

ACCEPTANCE_LINES = []


@pytest.fixture
def half_pi():
    return HALF_PI


@pytest.fixture
def acceptance_report():
    """Record one verdict line per acceptance criterion (printed in the summary)."""
    def record(label, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'} {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
