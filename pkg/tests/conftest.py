import pytest

from risee import asymptotic, default_scenario, path_loss

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def scenario():
    return default_scenario()


@pytest.fixture(scope="session")
def pl(scenario):
    return path_loss(scenario.geometry)


@pytest.fixture(scope="session")
def config(scenario):
    return scenario.system


@pytest.fixture(scope="session")
def consts(scenario, pl):
    return asymptotic.constants(pl, scenario.rayleigh, scenario.system)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
