"""Backward search for adversarial perturbations over recorded games.

Both searches walk a game from its last state to its first, skip states where
the target is already wrong, build the meaningless-move perturbations of each
remaining state and test them, cheapest checks first.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

from advstate.agents.agent import Agent, AgentSpec, hinted_value
from advstate.game import Action
from advstate.perturbation import (
    MeaningfulActionCache,
    PerturbationCandidate,
    StepMode,
    TERRITORY_THRESHOLD,
    Thresholds,
    enumerate_candidates,
    get_meaningless_actions,
)
from advstate.record import GameRecord


class AttackKind(str, enum.Enum):
    VALUE = "value"
    POLICY = "policy"


class AnchorIllegal(ValueError):
    """The target's move at s cannot be played at s'."""


@dataclass(frozen=True)
class AttackSettings:
    thresholds: Thresholds = field(default_factory=Thresholds)
    use_territory: bool = True
    use_hint: bool = True
    use_filter: bool = True
    exhaustive: bool = False
    territory_threshold: float = TERRITORY_THRESHOLD

    def to_dict(self) -> dict:
        th = self.thresholds
        return {
            "eta_eq": th.eta_eq,
            "eta_correct": th.eta_correct,
            "eta_adv": th.eta_adv,
            "use_territory": self.use_territory,
            "use_hint": self.use_hint,
            "use_filter": self.use_filter,
            "exhaustive": self.exhaustive,
            "territory_threshold": self.territory_threshold,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AttackSettings":
        th = Thresholds(d["eta_eq"], d["eta_correct"], d["eta_adv"])
        return cls(th, d["use_territory"], d["use_hint"], d["use_filter"], d["exhaustive"],
                   d["territory_threshold"])


def speedup(target_evals: int, examiner_evals: int, examiner_sims: int) -> float:
    """``n_t * n_mcts / (n_t + n_e * n_mcts)``; 0 when nothing was evaluated."""
    den = target_evals + examiner_evals * examiner_sims
    if den == 0:
        return 0.0
    return float(Fraction(target_evals * examiner_sims, den))


@dataclass
class AttackStats:
    target_evals: int = 0
    examiner_evals: int = 0
    examiner_sims: int = 0
    filtered_out: int = 0
    candidate_count: int = 0
    quick_evals: int = 0
    states_scanned: int = 0
    states_skipped: int = 0

    @property
    def speedup(self) -> float:
        return speedup(self.target_evals, self.examiner_evals, self.examiner_sims)

    def to_dict(self) -> dict:
        return {
            "target_evals": self.target_evals,
            "examiner_evals": self.examiner_evals,
            "examiner_sims": self.examiner_sims,
            "filtered_out": self.filtered_out,
            "candidate_count": self.candidate_count,
            "quick_evals": self.quick_evals,
            "states_scanned": self.states_scanned,
            "states_skipped": self.states_skipped,
            "speedup": self.speedup,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AttackStats":
        return cls(**{k: v for k, v in d.items() if k != "speedup"})


@dataclass
class AttackReport:
    game_id: str
    base_index: int
    kind: AttackKind
    candidate: PerturbationCandidate
    measured: dict
    stats: AttackStats

    @property
    def step_mode(self) -> StepMode:
        return self.candidate.step_mode

    @property
    def identity(self) -> tuple:
        c = self.candidate
        return (self.game_id, self.kind.value, self.base_index, str(c.b0), str(c.b1))


@dataclass
class AttackOutcome:
    """All successes of one scan in discovery order plus its call accounting."""

    kind: AttackKind
    mode: StepMode
    reports: list[AttackReport]
    stats: AttackStats

    @property
    def report(self) -> AttackReport | None:
        return self.reports[0] if self.reports else None

    @property
    def found(self) -> bool:
        return bool(self.reports)


def quick_filter_value(v_sprime: float, V_s: float, th: Thresholds) -> bool:
    """Necessary condition for a value attack, using only cheap or cached values."""
    return abs(v_sprime - V_s) >= th.eta_adv - th.eta_eq


def value_clauses(v_s: float, V_s: float, v_sp: float, V_sp: float, th: Thresholds) -> dict[str, bool]:
    return {
        "target_correct_at_s": abs(v_s - V_s) <= th.eta_correct,
        "target_wrong_at_s_prime": abs(v_sp - V_sp) >= th.eta_adv,
        "equivalent": abs(V_s - V_sp) <= th.eta_eq,
    }


def policy_clauses(V_s: float, V_sp: float, q_s_as: float | None, q_sp_asp: float | None,
                   q_sp_as: float | None, q_s_asp: float | None, th: Thresholds) -> dict[str, bool]:
    def close(q, v, bound):
        return q is not None and abs(q - v) <= bound

    def far(q, v, bound):
        return q is not None and abs(q - v) >= bound

    return {
        "target_move_good_at_s": close(q_s_as, V_s, th.eta_correct),
        "target_move_bad_at_s_prime": far(q_sp_asp, V_sp, th.eta_adv),
        "anchor_good_at_s_prime": close(q_sp_as, V_sp, th.eta_eq),
        "new_move_bad_at_s": far(q_s_asp, V_s, th.eta_adv),
        "equivalent": abs(V_s - V_sp) <= th.eta_eq,
    }


def value_criteria(s, s_prime, target: Agent, examiner: Agent, th: Thresholds,
                   hint: Action | None = None) -> bool:
    V_sp = hinted_value(s_prime, hint, examiner)
    c = value_clauses(target.value(s), examiner.value(s), target.value(s_prime), V_sp, th)
    return c["target_correct_at_s"] and c["target_wrong_at_s_prime"]


def policy_criteria(s, s_prime, target: Agent, examiner: Agent, th: Thresholds,
                    hint: Action | None = None) -> bool:
    a_s = target.best_action(s)
    a_sp = target.best_action(s_prime)
    q_sp_as = examiner.q(s_prime, a_s)
    if q_sp_as is None:
        raise AnchorIllegal(f"{a_s} is illegal after the perturbation")
    V_sp = hinted_value(s_prime, hint, examiner)
    c = policy_clauses(examiner.value(s), V_sp, examiner.q(s, a_s), examiner.q(s_prime, a_sp),
                       q_sp_as, examiner.q(s, a_sp), th)
    c.pop("equivalent")
    return all(c.values())


def _action_text(a: Action | None) -> str | None:
    return None if a is None else str(a)


def _reset(*agents: Agent) -> None:
    for a in agents:
        a.reset_counters()


def _finish(stats: AttackStats, target: Agent, examiner: Agent, sims: int) -> AttackStats:
    stats.target_evals = target.evals
    stats.examiner_evals = examiner.evals
    stats.quick_evals = examiner.quick_evals
    stats.examiner_sims = sims
    return stats


def value_attack_game(game: GameRecord, target: Agent, examiner: Agent, settings: AttackSettings,
                      mode: StepMode, examiner_sims: int = 0) -> AttackOutcome:
    th = settings.thresholds
    states = game.states
    _reset(target, examiner)
    stats = AttackStats()
    cache = MeaningfulActionCache()
    reports: list[AttackReport] = []
    for i in range(len(states) - 1, -1, -1):
        s = states[i]
        if s.is_terminal:
            continue
        stats.states_scanned += 1
        V_s = examiner.value(s)
        v_s = target.value(s)
        if abs(V_s - v_s) > th.eta_correct:
            stats.states_skipped += 1
            continue
        meaningless = get_meaningless_actions(s, examiner, cache, th, settings.use_territory, i,
                                              settings.territory_threshold)
        hint = examiner.best_action(s) if settings.use_hint else None
        for cand in enumerate_candidates(i, states, meaningless, mode):
            stats.candidate_count += 1
            sp = cand.perturbed
            v_sp = target.value(sp)
            if settings.use_filter and not quick_filter_value(v_sp, V_s, th):
                stats.filtered_out += 1
                continue
            V_sp = hinted_value(sp, hint, examiner)
            if abs(v_sp - V_sp) >= th.eta_adv and abs(V_s - V_sp) <= th.eta_eq:
                measured = {
                    "v_s": v_s,
                    "V_s": V_s,
                    "v_s_prime": v_sp,
                    "V_s_prime": V_sp,
                    "V_s_prime_plain": examiner.value(sp),
                    "hint": _action_text(hint),
                }
                reports.append(AttackReport(game.game_id, i, AttackKind.VALUE, cand, measured, stats))
                if not settings.exhaustive:
                    return AttackOutcome(AttackKind.VALUE, mode, reports,
                                         _finish(stats, target, examiner, examiner_sims))
    return AttackOutcome(AttackKind.VALUE, mode, reports, _finish(stats, target, examiner, examiner_sims))


def policy_attack_game(game: GameRecord, target: Agent, examiner: Agent, settings: AttackSettings,
                       mode: StepMode, examiner_sims: int = 0) -> AttackOutcome:
    th = settings.thresholds
    states = game.states
    _reset(target, examiner)
    stats = AttackStats()
    cache = MeaningfulActionCache()
    reports: list[AttackReport] = []
    for i in range(len(states) - 1, -1, -1):
        s = states[i]
        if s.is_terminal:
            continue
        stats.states_scanned += 1
        V_s = examiner.value(s)
        a_s = target.best_action(s)
        q_s_as = examiner.q(s, a_s) if a_s is not None else None
        if q_s_as is None or abs(q_s_as - V_s) > th.eta_correct or V_s < th.eta_adv:
            stats.states_skipped += 1
            continue
        meaningless = get_meaningless_actions(s, examiner, cache, th, settings.use_territory, i,
                                              settings.territory_threshold)
        hint = examiner.best_action(s) if settings.use_hint else None
        for cand in enumerate_candidates(i, states, meaningless, mode):
            stats.candidate_count += 1
            sp = cand.perturbed
            a_sp = target.best_action(sp)
            q_s_asp = examiner.q(s, a_sp) if a_sp is not None else None
            if q_s_asp is None:
                # the new move is not even playable at s, so the last clause is undefined
                continue
            if settings.use_filter and abs(q_s_asp - V_s) < th.eta_adv:
                stats.filtered_out += 1
                continue
            V_sp = hinted_value(sp, hint, examiner)
            q_sp_as = examiner.q(sp, a_s)
            if q_sp_as is None:
                continue
            q_sp_asp = examiner.q(sp, a_sp)
            c = policy_clauses(V_s, V_sp, q_s_as, q_sp_asp, q_sp_as, q_s_asp, th)
            if all(c.values()):
                measured = {
                    "V_s": V_s,
                    "V_s_prime": V_sp,
                    "V_s_prime_plain": examiner.value(sp),
                    "a_s": str(a_s),
                    "a_s_prime": str(a_sp),
                    "Q_s_a_s": q_s_as,
                    "Q_s_prime_a_s_prime": q_sp_asp,
                    "Q_s_prime_a_s": q_sp_as,
                    "Q_s_a_s_prime": q_s_asp,
                    "hint": _action_text(hint),
                }
                reports.append(AttackReport(game.game_id, i, AttackKind.POLICY, cand, measured, stats))
                if not settings.exhaustive:
                    return AttackOutcome(AttackKind.POLICY, mode, reports,
                                         _finish(stats, target, examiner, examiner_sims))
    return AttackOutcome(AttackKind.POLICY, mode, reports, _finish(stats, target, examiner, examiner_sims))


ATTACKS = {AttackKind.VALUE: value_attack_game, AttackKind.POLICY: policy_attack_game}


def attack_game(game: GameRecord, kind: AttackKind, target: Agent, examiner: Agent, settings: AttackSettings,
                mode: StepMode, examiner_sims: int = 0) -> AttackOutcome:
    return ATTACKS[AttackKind(kind)](game, target, examiner, settings, mode, examiner_sims)


def examiner_sims_of(spec: AgentSpec) -> int:
    return spec.simulations if spec.kind == "mcts" else 1
