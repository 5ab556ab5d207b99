"""Perturbation sets: meaningless-move detection and candidate enumeration.

A perturbation appends two actions ``b0, b1`` to the trajectory of a state so
that the same player is to move again. Only actions the examiner considers
meaningless (value-neutral) are used, and the perturbed state must keep the
examiner's win-rate within ``eta_eq`` of the original.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from advstate.agents.agent import Agent, hinted_value
from advstate.game import Action, GameState, IllegalAction, pass_action, skip_play

TERRITORY_THRESHOLD = 0.8


@dataclass(frozen=True)
class Thresholds:
    eta_eq: float = 0.1
    eta_correct: float = 0.15
    eta_adv: float = 0.5

    def __post_init__(self):
        for name in ("eta_eq", "eta_correct", "eta_adv"):
            x = getattr(self, name)
            if not 0.0 <= x <= 1.0:
                raise ValueError(f"{name}={x} is outside [0, 1]")
        if not self.eta_adv > self.eta_eq:
            raise ValueError(f"eta_adv ({self.eta_adv}) must exceed eta_eq ({self.eta_eq})")

    def is_eq(self, x: float, y: float) -> bool:
        return abs(x - y) <= self.eta_eq


class StepMode(str, enum.Enum):
    ONESTEP = "1step"
    TWOSTEP = "2step"


@dataclass(frozen=True)
class PerturbationCandidate:
    base_index: int
    b0: Action
    b1: Action
    perturbed: GameState

    @property
    def step_mode(self) -> StepMode:
        return StepMode.ONESTEP if self.b0.is_pass or self.b1.is_pass else StepMode.TWOSTEP

    def check(self, base: GameState) -> None:
        """Assert the structural invariants against the unperturbed state."""
        s = self.perturbed
        assert s.turn == base.turn
        assert s.history == base.history + (self.b0, self.b1)
        assert not s.is_terminal
        assert (self.b0.is_pass + self.b1.is_pass) <= 1


@dataclass
class MeaningfulActionCache:
    """Actions currently believed meaningful during one backward scan.

    ``changes`` logs every membership change together with the full examiner
    value that confirmed it.
    """

    actions: set = field(default_factory=set)
    hits: int = 0
    misses: int = 0
    examiner_checks: int = 0
    changes: list = field(default_factory=list)
    last_index: int | None = None

    def clear(self) -> None:
        self.actions.clear()
        self.hits = self.misses = self.examiner_checks = 0
        self.changes = []
        self.last_index = None

    def enter(self, index: int | None) -> None:
        if index is None:
            return
        if self.last_index is not None and index >= self.last_index:
            raise ValueError(f"backward scan violated: index {index} after {self.last_index}")
        self.last_index = index


def semantically_equivalent(s: GameState, s_prime: GameState, examiner: Agent, th: Thresholds,
                            hint: Action | None = None) -> bool:
    if s.turn != s_prime.turn:
        return False
    v_prime = hinted_value(s_prime, hint, examiner) if hint is not None else examiner.value(s_prime)
    return abs(examiner.value(s) - v_prime) <= th.eta_eq


def is_meaningless(s: GameState, a: Action, examiner: Agent, th: Thresholds) -> bool:
    """Playing ``a`` (and letting the other side pass) changes V by at most eta_eq."""
    try:
        skipped = skip_play(s, a)
    except IllegalAction:
        return False
    if skipped.is_terminal or s.is_terminal:
        return False
    return abs(examiner.value(s) - examiner.value(skipped)) <= th.eta_eq


def territory_allows(territory: Sequence[float] | None, p: int, threshold: float = TERRITORY_THRESHOLD) -> bool:
    if territory is None:
        return True
    return abs(territory[p]) > threshold


def action_universe(s: GameState) -> list[Action]:
    """Legal placements for the turn player, then for the opponent after a pass."""
    out = [a for a in s.legal_actions() if not a.is_pass]
    after_pass = s.play(pass_action(s.turn))
    if not after_pass.is_terminal:
        out += [a for a in after_pass.legal_actions() if not a.is_pass]
    return out


def _probe_state(s: GameState, a: Action, best: Action) -> GameState | None:
    """State after ``a``, a pass by the other colour, then ``best``; None if illegal."""
    try:
        skipped = skip_play(s, a)
        if skipped.is_terminal:
            return None
        return skipped.play(best)
    except IllegalAction:
        return None


@dataclass
class _Probe:
    universe: list[Action]
    probes: list[GameState | None]
    reference: float


def _prepare(s: GameState, examiner: Agent, use_territory: bool, threshold: float) -> _Probe | None:
    if s.is_terminal:
        return None
    best = examiner.best_action(s)
    if best is None:
        return None
    reference = examiner.value(s.play(best))
    terr = examiner.territory(s) if use_territory else None
    universe = [a for a in action_universe(s) if territory_allows(terr, s.index(a.point), threshold)]
    probes = [_probe_state(s, a, best) for a in universe]
    return _Probe(universe, probes, reference)


def _split(s: GameState, actions: list[Action]) -> tuple[list[Action], list[Action]]:
    own = [a for a in actions if a.color == s.turn]
    other = [a for a in actions if a.color != s.turn]
    return own, other


def get_meaningless_actions(s: GameState, examiner: Agent, cache: MeaningfulActionCache, th: Thresholds,
                            use_territory: bool = True, index: int | None = None,
                            territory_threshold: float = TERRITORY_THRESHOLD
                            ) -> tuple[list[Action], list[Action]]:
    """Meaningless placements at ``s`` split into (turn colour, opponent colour).

    Each action is judged by the state reached after it, a pass, and the
    examiner's best reply. The cheap provider value decides first; the full
    examiner is consulted only when that would flip the cached verdict.
    Must be called with strictly decreasing ``index`` within one game.
    """
    cache.enter(index)
    prep = _prepare(s, examiner, use_territory, territory_threshold)
    if prep is None:
        return [], []
    ref = prep.reference
    kept = []
    for a, probe in zip(prep.universe, prep.probes):
        if probe is None:
            # cannot build the comparison state; keep the action out of the set
            continue
        quick = examiner.quick_value(probe)
        if a in cache.actions:
            if th.is_eq(quick, ref):
                full = examiner.value(probe)
                cache.examiner_checks += 1
                cache.misses += 1
                if th.is_eq(full, ref):
                    cache.actions.discard(a)
                    cache.changes.append((index, a, "meaningless", quick, full, ref))
            else:
                cache.hits += 1
        else:
            if not th.is_eq(quick, ref):
                full = examiner.value(probe)
                cache.examiner_checks += 1
                cache.misses += 1
                if not th.is_eq(full, ref):
                    cache.actions.add(a)
                    cache.changes.append((index, a, "meaningful", quick, full, ref))
            else:
                cache.hits += 1
        if a not in cache.actions:
            kept.append(a)
    return _split(s, kept)


def naive_meaningless_actions(s: GameState, examiner: Agent, th: Thresholds, use_territory: bool = True,
                              territory_threshold: float = TERRITORY_THRESHOLD
                              ) -> tuple[list[Action], list[Action]]:
    """Same classification with a full examiner call for every action and no cache."""
    prep = _prepare(s, examiner, use_territory, territory_threshold)
    if prep is None:
        return [], []
    kept = [a for a, probe in zip(prep.universe, prep.probes)
            if probe is not None and th.is_eq(examiner.value(probe), prep.reference)]
    return _split(s, kept)


def enumerate_candidates(s_index: int, states: Sequence[GameState], meaningless: tuple[list, list],
                         mode: StepMode) -> Iterator[PerturbationCandidate]:
    s = states[s_index]
    own, other = meaningless
    if mode == StepMode.ONESTEP:
        me_pass = pass_action(s.turn)
        them_pass = pass_action(s.turn.opponent)
        pairs = [(b0, them_pass) for b0 in own] + [(me_pass, b1) for b1 in other]
    else:
        pairs = [(b0, b1) for b0 in own for b1 in other]
    for b0, b1 in pairs:
        try:
            s_prime = s.play(b0).play(b1)
        except IllegalAction:
            continue
        if s_prime.is_terminal:
            continue
        yield PerturbationCandidate(s_index, b0, b1, s_prime)

