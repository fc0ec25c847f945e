import pytest

ACCEPTANCE_LINES = {}


@pytest.fixture
def report():
    """Record a one-line verdict for an acceptance criterion."""

    def record(n, ok, text):
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'} {text}"
        ACCEPTANCE_LINES[n] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
