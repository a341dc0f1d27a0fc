import sys
from pathlib import Path

import numpy as np
import pytest

from ocdetect import build_constellation, gen_channel, gen_noise, n0_from_ebn0, transmit

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def qam64():
    return build_constellation("qam64")


@pytest.fixture(scope="session")
def qam16():
    return build_constellation("qam16")


@pytest.fixture(scope="session")
def qpsk():
    return build_constellation("qpsk")


@pytest.fixture(scope="session")
def bpsk():
    return build_constellation("bpsk")


def make_instance(rng, B, U, c, ebn0=10.0):
    """Random (H, s, y, N0) with symbols drawn from ``c``."""
    H = gen_channel(B, U, int(rng.integers(2**63)))
    s = c.points[rng.integers(0, c.size, U)]
    N0 = n0_from_ebn0(ebn0, c.Q, U, B)
    y = transmit(H, s, gen_noise(B, N0, int(rng.integers(2**63))))
    return H, s, y, N0


@pytest.fixture
def instance():
    return make_instance


_ACCEPTANCE = pytest.StashKey()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = {}


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion."""
    lines = request.config.stash[_ACCEPTANCE]

    def record(number, title, ok, detail):
        lines[number] = f"{'PASS' if ok else 'FAIL'}  [{number:>2}] {title}: {detail}"
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
