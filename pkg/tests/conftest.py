import math

import pytest
from hypothesis import HealthCheck, settings

from fdaloha.model import SystemParams

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SQRT2 = math.sqrt(2.0)
PI2 = math.pi**2

# Closed forms at r=1, theta=2, alpha=4 where Gamma(3/2) Gamma(1/2) = pi/2.
OMEGA_HD_REF = 2.0 * SQRT2 / 3.0 * PI2
OMEGA_HD_SLOTTED_REF = SQRT2 / 2.0 * PI2


@pytest.fixture
def ref_params():
    return SystemParams(lambda_=0.05, r=1.0, alpha=4.0, theta=2.0, eta=1.0, w=1.0)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
