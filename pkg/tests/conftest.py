import json
import sys
import time
from pathlib import Path

import pytest

# lets tests import the helper modules that sit next to them
sys.path.insert(0, str(Path(__file__).parent))

from advstate.agents.agent import AgentSpec  # noqa: E402
from advstate.attack import AttackKind  # noqa: E402
from helpers import CRITERIA, DATA, completeness_corpus, exhaustive_scan  # noqa: E402


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for line in CRITERIA:
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def brute_force():
    """Stored filter-off scans of the completeness corpus (scripts/make_brute_fixture.py)."""
    return json.loads((DATA / "brute_force.json").read_text())


@pytest.fixture(scope="session")
def filtered_scan(brute_force):
    """Filter-on scans of the same corpus, run live with the recorded agents."""
    target = AgentSpec.from_dict(brute_force["target"])
    examiner = AgentSpec.from_dict(brute_force["examiner"])
    t0 = time.perf_counter()
    rows = []
    for game, settings in completeness_corpus():
        for kind in AttackKind:
            row = exhaustive_scan(game, kind, target, examiner, settings, use_filter=True)
            row["rules"] = game.rules.game
            rows.append(row)
    return {"rows": rows, "seconds": time.perf_counter() - t0}
