import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from quasiprob.grid import make_domain
from quasiprob.measures import AarnesMeasure, UniformMeasure


@pytest.fixture(scope="session")
def d513():
    return make_domain(513)


@pytest.fixture(scope="session")
def d257():
    return make_domain(257)


@pytest.fixture(scope="session")
def d65():
    return make_domain(65)


@pytest.fixture(scope="session")
def aarnes513(d513):
    return AarnesMeasure(d513)


@pytest.fixture(scope="session")
def uniform513(d513):
    return UniformMeasure(d513)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    verdicts = getattr(mod, "VERDICTS", None)
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(verdicts):
        terminalreporter.write_line(verdicts[k])
