import numpy as np
import pytest

from interplab import lp_space, structured_couple


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def c4_fourier():
    """Weighted l2 / l4 on C^4 with fourier structures."""
    return structured_couple(lp_space(4, 2.0, [1, 2, 0.5, 1.5]), lp_space(4, 4.0), "fourier", K=8)


@pytest.fixture
def c2_lp():
    return structured_couple(lp_space(2, 2.0, [1, 2]), lp_space(2, 3.0), "lp", K=12)


def cvec(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
