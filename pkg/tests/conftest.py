import sys
from pathlib import Path

import pytest

from dbarrier import DeltaDoubleBarrier, RectDoubleBarrier

GAAS = 0.067


@pytest.fixture
def ref_rect():
    """b = w = 5 nm, U0R = 0.7 eV, real barrier."""
    return RectDoubleBarrier(b=5.0, w=5.0, U0=0.7, m=GAAS)


@pytest.fixture
def ref_delta():
    """w = 3 nm, V0R = 2.3 nm eV, real deltas."""
    return DeltaDoubleBarrier(w=3.0, V0=2.3, m=GAAS)


SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


def recipe_command(path):
    """CLI command that a scenario recipe is meant for, from its file name."""
    name = Path(path).stem
    for key, command in (("oracle", "oracle-check"), ("singularity", "singularity"),
                         ("res_sweep", "res-sweep"), ("spectrum", "spectrum"),
                         ("cubic", "cubic"), ("locus", "locus")):
        if key in name:
            return command
    raise ValueError(f"no command for recipe {name}")


RECIPES = sorted(SCENARIO_DIR.glob("*.json"))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
