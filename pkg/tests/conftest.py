import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from occupant_dbn.bayes import Node, build_network  # noqa: E402
from occupant_dbn.scenario import bundled_scenario_path, load_scenario  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def chain():
    """A -> B with P(A=t) = 0.3 and B a copy of A."""
    return build_network(
        [
            Node("A", ("t", "f"), (), {(): (0.3, 0.7)}),
            Node("B", ("t", "f"), ("A",), {("t",): (1.0, 0.0), ("f",): (0.0, 1.0)}),
        ]
    )


@pytest.fixture(scope="session")
def office_rain():
    return load_scenario(bundled_scenario_path("office_rain"))


@pytest.fixture(scope="session")
def office_dry():
    return load_scenario(bundled_scenario_path("office_dry"))


# -- acceptance report ------------------------------------------------------------

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record():
    """Store one criterion outcome for the end-of-session summary."""

    def _record(number, ok, detail):
        ACCEPTANCE[number] = (bool(ok), detail)
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})")
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
