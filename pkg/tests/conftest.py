import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_criteria = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Record an acceptance verdict: ``criterion(number, passed, detail)``."""
    store = request.config.stash.setdefault(_criteria, {})

    def record(number, passed, detail):
        store[number] = (bool(passed), detail)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'} {detail}")

    return record


def pytest_terminal_summary(terminalreporter, config):
    store = config.stash.get(_criteria, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(store):
        passed, detail = store[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}")
