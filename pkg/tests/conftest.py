import pytest

_LINES: list[str] = []


@pytest.fixture
def report():
    """Collect one summary line per acceptance check; printed at the end of the run."""
    def add(line: str) -> None:
        _LINES.append(line)
        print(line)
    return add


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for ln in _LINES:
            terminalreporter.write_line(ln)
