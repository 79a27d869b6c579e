import random

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from simpson_lab.chart import ChartParams
from simpson_lab.instances import random_higgs
from simpson_lab.ring import ring_for

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def R():
    return ring_for(3, 1, 8, 2)


@pytest.fixture(scope="session")
def R9():
    return ring_for(3, 2, 4, 1)


def elements(ring, min_vpi=0):
    coeffs = st.lists(st.integers(0, ring.q - 1), min_size=ring.phi, max_size=ring.phi)
    return coeffs.map(lambda c: ring.pi_power(min_vpi) * ring.elt(c))


def make_higgs(ring, d, rank, seed, min_vpi=1, r=None):
    params = ChartParams(d=d, r=min(d, 1) if r is None else r)
    return random_higgs(ring, params, rank, random.Random(seed), min_vpi=min_vpi)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
