"""Shared test plumbing: collects benchmark-criterion outcomes for the summary."""
import pytest

_criterion_lines = []


@pytest.fixture(scope="session")
def criterion_log():
    """Recorder for one pass/fail line per benchmark criterion."""

    def record(number, passed, detail):
        verdict = "PASS" if passed else "FAIL"
        _criterion_lines.append(f"criterion {number:02d}: {verdict} ({detail})")

    return record


def pytest_terminal_summary(terminalreporter):
    if not _criterion_lines:
        return
    terminalreporter.section("benchmark criteria")
    for line in sorted(_criterion_lines):
        terminalreporter.write_line(line)
