import numpy as np
import pytest

from fluxpair.coupled import DEVICE_PARAMS, solve_coupled


@pytest.fixture(scope="session")
def device_spectrum():
    return solve_coupled(DEVICE_PARAMS, np.pi)


@pytest.fixture(scope="session")
def pure_spectrum():
    return solve_coupled(DEVICE_PARAMS.pure_inductive(), np.pi)


@pytest.fixture(scope="session")
def uncoupled_spectrum():
    return solve_coupled(DEVICE_PARAMS.uncoupled(), np.pi)


def pytest_terminal_summary(terminalreporter):
    from support import ACCEPTANCE_RESULTS

    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
