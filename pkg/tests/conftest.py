import pytest

# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])


@pytest.fixture
def record_criterion(capsys):
    def record(n: int, ok: bool, detail: str):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {n:2d}: {detail}"
        ACCEPTANCE_LINES[n] = line
        with capsys.disabled():
            print("\n" + line)
        return ok

    return record
