import math

import pytest

from chirposc import Constant, Exponential, Modulated, Sampled, SimulationWindow, solve_modes


def exp_window(ratio: float, end_ratio: float = 0.05) -> SimulationWindow:
    """Window on which nu(T)/kappa falls to ``end_ratio`` (kappa = 1)."""
    return SimulationWindow(math.log(ratio / end_ratio))


# profile test matrix, time unit 1/kappa for exponential chirps and 1/nu0 otherwise
PROFILE_MATRIX = {
    "constant": (Constant(1.0), SimulationWindow(60.0)),
    "exp10": (Exponential(10.0, 1.0), exp_window(10.0)),
    "exp100": (Exponential(100.0, 1.0), exp_window(100.0)),
    "exp1000": (Exponential(1000.0, 1.0), exp_window(1000.0)),
    "modulated": (Modulated(1.0, 0.3, 0.45), SimulationWindow(60.0)),
    "sampled": (Sampled(((0.0, 1.0), (5.0, 0.4), (12.0, 2.5), (30.0, 1.2))), SimulationWindow(30.0)),
}


@pytest.fixture(scope="session")
def matrix_solutions():
    return {name: solve_modes(p, w) for name, (p, w) in PROFILE_MATRIX.items()}


@pytest.fixture(scope="session")
def exp100_t12():
    return solve_modes(Exponential(100.0, 1.0), SimulationWindow(12.0))


@pytest.fixture(scope="session")
def constant_t50():
    return solve_modes(Constant(1.0), SimulationWindow(50.0))


# --- acceptance report ---------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(label: str, passed: bool, detail: str) -> str:
    """Store and print one verdict line; returned for use as an assertion message."""
    line = f"{label}: {'PASS' if passed else 'FAIL'} -- {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
