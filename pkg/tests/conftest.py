import pytest

from pilotsense import SensingParams
from pilotsense.model import db_to_linear

# (criterion, verdict, detail) lines collected by test_acceptance
ACCEPTANCE_REPORT: list[tuple[str, bool, str]] = []


@pytest.fixture
def report():
    def record(criterion: str, passed: bool, detail: str = "") -> None:
        ACCEPTANCE_REPORT.append((criterion, bool(passed), detail))
    return record


@pytest.fixture
def paper_params():
    """theta = 0.1, SNR = -5 dB, N = 100, sigma^2 = 1."""
    return SensingParams(0.1, db_to_linear(-5.0), 1.0, 100)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in ACCEPTANCE_REPORT:
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{verdict}] {criterion}: {detail}")
