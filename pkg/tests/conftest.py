import os
from functools import lru_cache

import pytest
from hypothesis import HealthCheck, settings

from hopfnet.fixtures import FIXTURES, fixture

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=400, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# filled by test_acceptance; printed at the end of the run
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@lru_cache(maxsize=None)
def _net(name):
    return fixture(name)


@pytest.fixture(params=sorted(FIXTURES))
def any_fixture(request):
    return request.param, _net(request.param)


@pytest.fixture
def net():
    return _net
