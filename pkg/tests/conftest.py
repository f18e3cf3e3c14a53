import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

_LINES: dict[int, str] = {}


@pytest.fixture
def acceptance():
    """Record the pass/fail line of an acceptance criterion."""

    def record(number: int, label: str, ok: bool, detail: str):
        _LINES[number] = f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {label}: {detail}"
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_LINES):
            terminalreporter.write_line(_LINES[k])
