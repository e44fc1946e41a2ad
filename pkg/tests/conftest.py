import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def check(number: int, title: str, ok: bool, detail: str = "") -> None:
        ACCEPTANCE_LINES.append(f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}  [{detail}]")
        assert ok, f"criterion {number} failed: {detail}"

    return check


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
