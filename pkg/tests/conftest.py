import sys

import pytest

from hipo_sim.integrator import simulate
from hipo_sim.io import load_reference
from hipo_sim.model import ModelParams


@pytest.fixture(scope="session")
def reference():
    return load_reference()


@pytest.fixture(scope="session")
def reference_run(reference):
    params, config = reference
    return simulate(params, config)


@pytest.fixture(scope="session")
def simple_params():
    return ModelParams(m_ball=1.0, k_ball=100.0, c_ball=0.5, i_cover=0.1, k_cover=1.0,
                       c_cover=0.02, f_in=10.0, s_d=50.0, x_size=0.05, h=0.1, l_cover=1.0)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
