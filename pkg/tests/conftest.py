import numpy as np
import pytest

from boltzspec import SpectralGrid, make_radial_quadrature


ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running reproduction runs (minutes)")
    config.stash[ACCEPTANCE] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance(request):
    """Record the pass/fail line of an acceptance criterion, print it and assert it."""
    def record(number: int, title: str, checks: list[tuple[str, bool]]):
        ok = all(passed for _, passed in checks)
        detail = "; ".join(f"{text} [{'ok' if passed else 'FAIL'}]" for text, passed in checks)
        line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title}: {detail}"
        request.config.stash[ACCEPTANCE].append(line)
        print(line)
        assert ok, line
    return record


@pytest.fixture(scope="session")
def grid8():
    return SpectralGrid(8, 6.0)


@pytest.fixture(scope="session")
def grid16():
    return SpectralGrid(16, 6.0)


@pytest.fixture(scope="session")
def rq8():
    return make_radial_quadrature(8, 6.0)


@pytest.fixture(scope="session")
def rq16():
    return make_radial_quadrature(16, 6.0)


def bkw(K, vsq):
    """Exact self-similar solution for Maxwell molecules with ``B = 1/(4 pi)``."""
    return np.exp(-vsq / (2 * K)) / (2 * np.pi * K) ** 1.5 * ((5 * K - 3) / (2 * K) + (1 - K) / (2 * K**2) * vsq)
