import pathlib

import numpy as np
import pytest

from surfdist.instances import ellipsoid_example, random_instance, sphere_example, symmetric_example
from surfdist.problem import load_instance
from surfdist.solver import solve_global

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"

_ACCEPTANCE_LINES = []


def record_criterion(label, passed, detail=""):
    line = f"{label}: {'PASS' if passed else 'FAIL'}" + (f"  ({detail})" if detail else "")
    _ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def sphere():
    return sphere_example()


@pytest.fixture(scope="session")
def ellipsoid():
    return ellipsoid_example()


@pytest.fixture(scope="session")
def symmetric():
    return symmetric_example()


@pytest.fixture(scope="session")
def sphere_cert(sphere):
    return solve_global(sphere)


@pytest.fixture(scope="session")
def ellipsoid_cert(ellipsoid):
    return solve_global(ellipsoid)


@pytest.fixture(scope="session")
def symmetric_cert(symmetric):
    return solve_global(symmetric)


@pytest.fixture(scope="session")
def random_instances():
    rng = np.random.default_rng(20240611)
    return [random_instance(rng, 2 + i % 2) for i in range(20)]


@pytest.fixture(scope="session")
def random_certs(random_instances):
    return [solve_global(inst) for inst in random_instances]


@pytest.fixture(scope="session")
def fixture_instances():
    return {p.stem: load_instance(p) for p in FIXTURES.glob("*.json")}
