import json

import pytest

from advstate.agents.agent import AgentSpec
from advstate.attack import AttackKind, AttackSettings, speedup
from advstate.campaign import CampaignConfig, run_campaign
from advstate.game import Action, Color, go_rules
from advstate.perturbation import StepMode
from advstate.record import GameRecord
from helpers import corpus


@pytest.fixture(scope="module")
def small():
    games = corpus("go5", 3)
    cfg = CampaignConfig((AgentSpec("mcts", 1), AgentSpec("mcts", 5)), AgentSpec("mcts", 30), AttackSettings())
    return games, cfg


def test_repeat_and_parallel_runs_agree(small):
    games, cfg = small
    first = run_campaign(games, cfg)
    again = run_campaign(games, cfg)
    pooled = run_campaign(games, cfg, workers=2)
    for other in (again, pooled):
        assert other.summary_json() == first.summary_json()
        assert other.summary_csv() == first.summary_csv()
        assert other.reports == first.reports


def test_summary_accounting(small):
    games, cfg = small
    camp = run_campaign(games, cfg)
    rows = camp.summary_rows()
    assert len(rows) == 4
    for row in rows:
        assert row["games"] == len(games)
        assert 0.0 <= row["success_1step"] <= row["success_2step"] <= 1.0
    doc = json.loads(camp.summary_json())
    for row in doc["rows"]:
        cell = [t for t in doc["tasks"] if camp.cfg.target_specs[t["target"]].label() == row["target"]
                and t["kind"] == row["kind"]]
        n_t = sum(sc["target_evals"] for t in cell for sc in t["scans"])
        n_e = sum(sc["examiner_evals"] for t in cell for sc in t["scans"])
        assert row["speedup"] == speedup(n_t, n_e, row["examiner_sims"])


def test_two_step_runs_only_after_one_step_fails(small):
    games, cfg = small
    camp = run_campaign(games, cfg)
    for r in camp.results:
        modes = [sc.mode for sc in r.scans]
        assert modes in (["1step"], ["1step", "2step"])
        if modes == ["1step"]:
            assert r.scans[0].found


def test_bad_game_is_recorded_not_fatal():
    bad = GameRecord(5, go_rules(5), (Action(Color.BLACK, (0, 0)), Action(Color.WHITE, (0, 0))), "broken")
    games = [bad] + corpus("go5", 1)
    cfg = CampaignConfig((AgentSpec("mcts", 1),), AgentSpec("mcts", 10), AttackSettings(),
                         (AttackKind.VALUE,), (StepMode.ONESTEP,))
    camp = run_campaign(games, cfg)
    assert camp.results[0].error and "IllegalMove" in camp.results[0].error
    assert camp.results[1].error is None
    row = camp.summary_rows()[0]
    assert row["games"] == 2 and row["errors"] == 1
