import random
from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from advstate.agents.agent import AgentSpec
from advstate.attack import (
    AnchorIllegal,
    AttackKind,
    AttackSettings,
    AttackStats,
    attack_game,
    policy_clauses,
    policy_criteria,
    quick_filter_value,
    speedup,
    value_clauses,
    value_criteria,
)
from advstate.game import pass_action
from advstate.perturbation import StepMode, Thresholds, semantically_equivalent
from helpers import Scripted, corpus

TH = Thresholds()
unit = st.floats(0.0, 1.0, allow_nan=False)


@pytest.mark.parametrize("v_sp,V_s,passes", [(0.45, 0.80, False), (0.30, 0.80, True), (0.80, 0.30, True),
                                             (0.80, 0.80, False)])
def test_quick_filter_arithmetic(v_sp, V_s, passes):
    assert quick_filter_value(v_sp, V_s, TH) is passes


@given(unit, unit, unit)
def test_quick_filter_never_drops_a_success(V_s, V_sp, v_sp):
    if abs(V_s - V_sp) <= TH.eta_eq and abs(v_sp - V_sp) >= TH.eta_adv:
        assert quick_filter_value(v_sp, V_s, TH)


def test_quick_filter_sweep():
    rng = random.Random(0)
    checked = 0
    while checked < 10_000:
        V_s = rng.random()
        V_sp = min(1.0, max(0.0, V_s + rng.uniform(-TH.eta_eq, TH.eta_eq)))
        v_sp = rng.random()
        if abs(V_s - V_sp) > TH.eta_eq or abs(v_sp - V_sp) < TH.eta_adv:
            continue
        assert quick_filter_value(v_sp, V_s, TH)
        checked += 1


def test_value_clause_examples():
    c = value_clauses(0.70, 0.72, 0.10, 0.70, TH)
    assert c["target_correct_at_s"] and c["target_wrong_at_s_prime"]
    assert not value_clauses(0.40, 0.72, 0.10, 0.70, TH)["target_correct_at_s"]


def test_policy_clause_example():
    V = 0.8
    c = policy_clauses(V, V, V - 0.02, V - 0.6, V - 0.05, V - 0.6, TH)
    assert all(c.values())


@given(unit, unit, unit, unit)
def test_same_move_cannot_satisfy_policy_clauses(V_s, V_sp, q1, q2):
    # a*_s = a*_s' makes Q(s', a*_s') and Q(s', a*_s) the same number
    c = policy_clauses(V_s, V_sp, q1, q2, q2, q1, TH)
    assert not (c["target_move_bad_at_s_prime"] and c["anchor_good_at_s_prime"])


def test_anchor_illegal_after_perturbation():
    game = corpus("go5", 1)[0]
    s = game.states[10]
    target = AgentSpec("mcts", 1).build()
    a_s = target.best_action(s)
    sp = s.play(a_s).play(pass_action(s.turn.opponent))
    with pytest.raises(AnchorIllegal):
        policy_criteria(s, sp, target, AgentSpec("mcts", 20).build(), TH)


def test_value_criteria_on_agents():
    game = corpus("go5", 1)[0]
    s = game.states[6]
    agent = AgentSpec("mcts", 20).build()
    # an agent never disagrees with itself
    assert not value_criteria(s, s, agent, agent, TH)


@pytest.mark.parametrize("kind", list(AttackKind))
def test_self_consistent_target_gives_nothing(kind):
    game = corpus("go5", 1)[0]
    store = {}
    spec = AgentSpec("mcts", 4)
    target, examiner = spec.build("t", store), spec.build("e", store)
    settings = AttackSettings(use_hint=False, exhaustive=True)
    for mode in StepMode:
        assert not attack_game(game, kind, target, examiner, settings, mode).found


def test_losing_everywhere_skips_every_state():
    game = corpus("go5", 1)[0]
    examiner = Scripted(lambda s: 0.2).agent()
    out = attack_game(game, AttackKind.POLICY, AgentSpec("mcts", 1).build(), examiner, AttackSettings(),
                      StepMode.TWOSTEP)
    assert not out.found
    assert out.stats.candidate_count == 0
    assert out.stats.states_skipped == out.stats.states_scanned > 0


@pytest.fixture(scope="module")
def nogo_policy_game():
    game = corpus("nogo7", 2)[1]
    return game, AgentSpec("mcts", 1), AgentSpec("mcts", 800)


def test_two_step_succeeds_where_one_step_fails(nogo_policy_game):
    game, t_spec, e_spec = nogo_policy_game
    settings = AttackSettings(use_territory=False)
    found = {}
    for mode in StepMode:
        for use_filter in (True, False):
            out = attack_game(game, AttackKind.POLICY, t_spec.build(), e_spec.build(),
                              replace(settings, use_filter=use_filter), mode, 800)
            found[mode, use_filter] = [r.identity for r in out.reports]
    assert found[StepMode.ONESTEP, True] == found[StepMode.ONESTEP, False] == []
    assert found[StepMode.TWOSTEP, True] == found[StepMode.TWOSTEP, False]
    assert len(found[StepMode.TWOSTEP, True]) == 1


def test_reports_recheck_with_fresh_agents(nogo_policy_game):
    game, t_spec, e_spec = nogo_policy_game
    out = attack_game(game, AttackKind.POLICY, t_spec.build(), e_spec.build(), AttackSettings(use_territory=False),
                      StepMode.TWOSTEP, 800)
    r = out.report
    s = game.states[r.base_index]
    sp = r.candidate.perturbed
    target, examiner = t_spec.build(), e_spec.build()
    hint = examiner.best_action(s)
    assert policy_criteria(s, sp, target, examiner, TH, hint)
    assert semantically_equivalent(s, sp, examiner, TH, hint)
    assert r.measured["a_s"] == str(target.best_action(s))
    assert r.measured["Q_s_a_s_prime"] == examiner.q(s, target.best_action(sp))


def test_backward_scan_reports_latest_state():
    game = corpus("go5", 1)[0]
    t_spec, e_spec = AgentSpec("mcts", 1), AgentSpec("mcts", 50)
    found = 0
    for kind in AttackKind:
        first = attack_game(game, kind, t_spec.build(), e_spec.build(), AttackSettings(), StepMode.TWOSTEP)
        every = attack_game(game, kind, t_spec.build(), e_spec.build(), AttackSettings(exhaustive=True),
                            StepMode.TWOSTEP)
        if not every.found:
            assert not first.found
            continue
        assert first.report.base_index == max(r.base_index for r in every.reports)
        assert first.report.identity == every.reports[0].identity
        found += 1
    assert found


def test_speedup_formula():
    assert speedup(10, 2, 200) == float(Fraction(2000, 410))
    assert speedup(0, 0, 200) == 0.0
    st_ = AttackStats(target_evals=300, examiner_evals=30, examiner_sims=800)
    assert st_.speedup == 300 * 800 / (300 + 30 * 800)
    assert AttackStats.from_dict(st_.to_dict()) == st_


def test_settings_round_trip():
    s = AttackSettings(Thresholds(0.1, 0.15, 0.7), use_territory=False, use_hint=False)
    assert AttackSettings.from_dict(s.to_dict()) == s


def test_value_attack_filter_economy(filtered_scan):
    rows = [r for r in filtered_scan["rows"] if r["kind"] == "value"]
    dropped = sum(r["filtered_out"] for r in rows)
    total = sum(r["candidates"] for r in rows)
    print(f"value attacks: {dropped}/{total} candidates dropped by the quick filter")
    assert dropped / total >= 0.90


def test_filtered_speedup_on_corpus(filtered_scan, brute_force):
    sims = brute_force["examiner"]["simulations"]
    n_t = sum(r["target_evals"] for r in filtered_scan["rows"])
    n_e = sum(r["examiner_evals"] for r in filtered_scan["rows"])
    ratio = speedup(n_t, n_e, sims)
    print(f"corpus speedup {ratio:.2f} from {n_t} target and {n_e} examiner evaluations")
    assert ratio >= 10
