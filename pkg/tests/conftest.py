import pytest

from nash_sens.games import motivating_game
from nash_sens.grids import GridSpec, build_grid


@pytest.fixture(scope="session")
def game():
    return motivating_game()


def unit_grid(points, players=2, dims=1):
    return build_grid(GridSpec.uniform(players, points, dims=dims))


@pytest.fixture(scope="session")
def grid201():
    return unit_grid(201)


@pytest.fixture(scope="session")
def grid21():
    return unit_grid(21)


ACCEPTANCE_LINES = []


def record_criterion(name, ok, detail=""):
    """Log one acceptance verdict; printed in the terminal summary and right away."""
    line = f"{'PASS' if ok else 'FAIL'} {name}" + (f": {detail}" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
