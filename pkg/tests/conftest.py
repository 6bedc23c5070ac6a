import numpy as np
import pytest

from safegame.game_model import PRESET_EPSILON, PRESETS

# Exact rational evaluations of the Type A table (see scripts/oracles.py).
TYPE_A_L = 8716 / 11845
TYPE_A_REWARD_AT_TARGET = 126.71679949345716
TYPE_A_RISK_AT_TARGET = 0.0008618902490502322
TYPE_A_DWSC_REWARD = 114.73
TYPE_A_DWSC_RISK = 0.00109


@pytest.fixture(params=sorted(PRESETS))
def preset_name(request):
    return request.param


@pytest.fixture
def table(preset_name):
    return PRESETS[preset_name]


@pytest.fixture
def epsilon(preset_name):
    return PRESET_EPSILON[preset_name]


def unit_grid(n):
    axis = np.linspace(0.0, 1.0, n)
    return np.meshgrid(axis, axis, indexing="ij")


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "ACCEPTANCE_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
