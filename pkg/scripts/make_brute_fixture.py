"""Regenerate tests/data/brute_force.json: exhaustive attacks with the quick filter off.

Slow (about a quarter of an hour on one core). Run from the repository root:

    python scripts/make_brute_fixture.py
"""

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from advstate.agents.agent import AgentSpec  # noqa: E402
from advstate.attack import AttackKind  # noqa: E402
from helpers import completeness_corpus, exhaustive_scan  # noqa: E402

TARGET = AgentSpec("mcts", 1)
EXAMINER = AgentSpec("mcts", 200)


def main():
    rows = []
    for game, settings in completeness_corpus():
        for kind in AttackKind:
            row = exhaustive_scan(game, kind, TARGET, EXAMINER, settings, use_filter=False)
            row["rules"] = game.rules.game
            print(row["rules"], row["game_id"], kind.value, len(row["ids"]), row["examiner_evals"],
                  round(row["seconds"], 1), flush=True)
            rows.append(row)
    doc = {"target": TARGET.to_dict(), "examiner": EXAMINER.to_dict(), "rows": rows}
    out = ROOT / "tests" / "data" / "brute_force.json"
    out.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
