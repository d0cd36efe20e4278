import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("asymspec", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("asymspec")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_CRITERIA = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Record one acceptance line and fail the test when the criterion fails."""
    lines = request.config.stash.setdefault(_CRITERIA, {})

    def report(number: int, name: str, ok: bool, detail: str):
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {name}: {detail}"
        lines[number] = line
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_CRITERIA, {})
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
