import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from planscape.space import ConfigurationSpace, EnvironmentLandscape  # noqa: E402

# plan order 00, 01, 10, 11
EX = [0.0, 3.0, 2.0, 1.0]
EY = [5.0, 2.0, 3.0, 0.0]


def make_landscape(values, shape=None, env="env"):
    values = np.asarray(values, dtype=float)
    space = ConfigurationSpace.from_sizes(shape or [2] * int(np.log2(len(values))))
    return EnvironmentLandscape(env, space, values, space.size)


@pytest.fixture
def ex():
    return make_landscape(EX, env="Ex")


@pytest.fixture
def ey():
    return make_landscape(EY, env="Ey")


def write_table(path, shape, values, perf_col="performance", names=None):
    """Write a complete table for ``shape`` in plan-index order."""
    space = ConfigurationSpace.from_sizes(shape)
    names = names or list(space.names)
    lines = [",".join([*names, perf_col])]
    for idx, value in enumerate(values):
        lines.append(",".join([*map(str, space.index_to_plan(idx)), repr(float(value))]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    optional = "8 dataset reproduction (optional)"
    if optional not in acceptance.RESULTS:
        acceptance.RESULTS[optional] = f"SKIP  {optional}  (PLANSCAPE_DATASETS not set)"
    for name in sorted(acceptance.RESULTS):
        terminalreporter.write_line(acceptance.RESULTS[name])
