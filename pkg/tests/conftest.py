import pytest

CRITERIA_LINES: list[str] = []


@pytest.fixture
def report_line():
    def emit(line: str):
        CRITERIA_LINES.append(line)
        print(line)
    return emit


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
