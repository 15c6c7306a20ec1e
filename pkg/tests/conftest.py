import sys

import numpy as np
import pytest


@pytest.fixture
def rng(request):
    # One generator per test, keyed by the test name so reruns are stable.
    key = sum(map(ord, request.node.name))
    return np.random.default_rng(key)


def random_coeffs(rng, degree, complex_coeffs=True):
    a = rng.standard_normal(degree + 1)
    if complex_coeffs:
        a = a + 1j * rng.standard_normal(degree + 1)
    return a


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "ACCEPTANCE_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("]")[1].split()[0])):
            terminalreporter.write_line(line)
