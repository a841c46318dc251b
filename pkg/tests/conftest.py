import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hermpair.atlas import CanonicalBlock

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def block(lambda_sq, k, eps=1):
    return CanonicalBlock.from_lambda_sq(lambda_sq, k, eps)


def close(a, b, tol=1e-9):
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    return a.shape == b.shape and np.allclose(a, b, atol=tol, rtol=0)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
