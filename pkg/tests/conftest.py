import functools

import pytest

from btquot.fundom import compute_fundamental_domain
from btquot.harmonic import HarmonicSpace
from btquot.quatalg import bundled_fixture, load_order

FIXTURES = ["p2_N13_1", "p53_N2_1", "p11_N2_1"]


@functools.lru_cache(maxsize=None)
def order(name):
    return load_order(bundled_fixture(name))


@functools.lru_cache(maxsize=None)
def domain(name):
    return compute_fundamental_domain(order(name))


@functools.lru_cache(maxsize=None)
def space(name, n=0):
    return HarmonicSpace(domain(name), n)


@pytest.fixture(scope="session")
def ctx2():
    return order("p2_N13_1")


@pytest.fixture(scope="session")
def ctx53():
    return order("p53_N2_1")


@pytest.fixture(scope="session")
def D2():
    return domain("p2_N13_1")


@pytest.fixture(scope="session")
def D53():
    return domain("p53_N2_1")


ACCEPTANCE = []  # (criterion, passed, detail) recorded by test_acceptance.py


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k, ok, detail in sorted(ACCEPTANCE, key=lambda t: t[0]):
        terminalreporter.write_line(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
