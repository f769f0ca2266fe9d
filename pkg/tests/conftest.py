import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from aoipreempt import EvaluationScenario, build_geometric, make_named_policy, make_policy  # noqa: E402

ACCEPTANCE_LINES = []


@pytest.fixture
def no_preempt():
    """M=2, q=1, geometric y=0.5, idle admission only."""
    model = build_geometric(0.5, 2)
    return EvaluationScenario(model, make_policy((0, None), [[1, 0, 0]], 2), 1.0)


@pytest.fixture
def geometric_ap():
    model = build_geometric(0.5, 2)
    return EvaluationScenario(model, make_named_policy("AP", M=2), 1.0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
