import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one pass/fail line; the terminal summary prints them all together."""

    def report(num, name, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {num:>2}: {name}" + (f"  ({detail})" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
