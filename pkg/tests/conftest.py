import os

import pytest
from hypothesis import HealthCheck, settings

from limitlab import backend
from limitlab._accel import HAVE_NUMBA

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

BACKENDS = ["numpy"] + (["numba"] if HAVE_NUMBA else [])


@pytest.fixture(params=BACKENDS)
def each_backend(request):
    with backend(request.param):
        yield request.param


def pytest_terminal_summary(terminalreporter):
    from . import _acceptance_log

    if _acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_acceptance_log.LINES):
            terminalreporter.write_line(_acceptance_log.LINES[number])
