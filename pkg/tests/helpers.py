from pathlib import Path

from advstate.agents.agent import Agent
from advstate.agents.base import Evaluation, PolicyValue


class Scripted:
    """Examiner built from value/quick-value/territory functions of the state."""

    def __init__(self, value, quick=None, territory=None):
        self.value = value
        self.quick = quick or value
        self.territory = territory
        self.seen = []

    def evaluate(self, s):
        self.seen.append(s)
        acts = s.legal_actions()
        pol = {a: (1.0 if i == 0 else 0.0) for i, a in enumerate(acts)}
        terr = self.territory(s) if self.territory else None
        return Evaluation(self.value(s), pol, {}, terr, {})

    def agent(self):
        return Agent(self.evaluate, lambda s: PolicyValue(self.quick(s), {}))


DATA = Path(__file__).with_name("data")

# one line per acceptance criterion, printed at the end of the run
CRITERIA: list[str] = []


def criterion(name, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else "")
    CRITERIA.append(line)
    print(line)
    return ok


def corpus(name, limit=None):
    from advstate.cli import load_corpus
    paths = sorted(str(p) for p in (DATA / name).glob("*.sgf"))[:limit]
    games, problems = load_corpus(paths)
    assert not problems
    return games


def exhaustive_scan(game, kind, t_spec, e_spec, settings, use_filter):
    """Every success of ``kind`` over both step modes, plus call accounting.

    One target and one examiner instance serve both modes, so evaluations
    shared between the 1-step and 2-step scans are counted once.
    """
    import time
    from dataclasses import replace

    from advstate.attack import attack_game, examiner_sims_of
    from advstate.perturbation import StepMode

    settings = replace(settings, use_filter=use_filter, exhaustive=True)
    target, examiner = t_spec.build("target"), e_spec.build("examiner")
    sims = examiner_sims_of(e_spec)
    row = {"game_id": game.game_id, "kind": kind.value, "ids": [], "target_evals": 0, "examiner_evals": 0,
           "candidates": 0, "filtered_out": 0}
    t0 = time.perf_counter()
    for mode in StepMode:
        out = attack_game(game, kind, target, examiner, settings, mode, sims)
        row["ids"] += [list(r.identity) for r in out.reports]
        row["target_evals"] += out.stats.target_evals
        row["examiner_evals"] += out.stats.examiner_evals
        row["candidates"] += out.stats.candidate_count
        row["filtered_out"] += out.stats.filtered_out
    row["seconds"] = time.perf_counter() - t0
    return row


def completeness_corpus():
    """The ten-game filter-completeness corpus with the settings used for each half."""
    from advstate.attack import AttackSettings
    go = [(g, AttackSettings(use_territory=True)) for g in corpus("go5")]
    nogo = [(g, AttackSettings(use_territory=False)) for g in corpus("nogo7", 5)]
    return go + nogo


def cache_agreement(games, examiner_spec, use_territory, th=None):
    """Cached backward scan vs naive full-examiner scan over every (state, action) pair."""
    from advstate.perturbation import (MeaningfulActionCache, Thresholds, action_universe,
                                       get_meaningless_actions, naive_meaningless_actions)
    th = th or Thresholds()
    agree = total = 0
    disagreements = []
    for rec in games:
        ex_cached = examiner_spec.build()
        ex_naive = examiner_spec.build()
        cache = MeaningfulActionCache()
        for i in range(len(rec.states) - 1, -1, -1):
            s = rec.states[i]
            if s.is_terminal:
                continue
            cached = get_meaningless_actions(s, ex_cached, cache, th, use_territory, i)
            naive = naive_meaningless_actions(s, ex_naive, th, use_territory)
            c_set = set(cached[0]) | set(cached[1])
            n_set = set(naive[0]) | set(naive[1])
            for a in action_universe(s):
                total += 1
                if (a in c_set) == (a in n_set):
                    agree += 1
                else:
                    disagreements.append((rec.game_id, i, str(a), a in c_set, a in n_set))
    return agree, total, disagreements
