"""Memoising agent front end plus the hint and robust-policy helpers."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable

from advstate.agents.base import AgentConfig, Evaluation, PolicyValue, argmax_action
from advstate.agents.heuristic import HeuristicProvider
from advstate.agents.mcts import PVMCTS, terminal_value
from advstate.agents.oracle import ExactOracle
from advstate.game import Action, GameState, IllegalAction


class Agent:
    """Memoising evaluator with call accounting.

    Results live in ``store`` (may be shared between agents built from the
    same spec, since evaluations are pure). Counters only count distinct
    states requested since the last :meth:`reset_counters`, so they do not
    depend on what other tasks have already put in the store. Terminal states
    are scored exactly and never count.
    """

    def __init__(self, evaluate: Callable[[GameState], Evaluation],
                 quick: Callable[[GameState], PolicyValue] | None = None, name: str = "agent",
                 store: dict | None = None):
        self._evaluate = evaluate
        self._quick = quick
        self.name = name
        self.store: dict = {} if store is None else store
        self._seen: set = set()
        self._quick_seen: set = set()

    @property
    def evals(self) -> int:
        return len(self._seen)

    @property
    def quick_evals(self) -> int:
        return len(self._quick_seen)

    def reset_counters(self) -> None:
        self._seen = set()
        self._quick_seen = set()

    def evaluate(self, s: GameState) -> Evaluation:
        k = s.memo_key
        ev = self.store.get(k)
        if ev is None:
            ev = self.store[k] = self._evaluate(s)
        self._seen.add(k)
        return ev

    def value(self, s: GameState) -> float:
        if s.is_terminal:
            return terminal_value(s)
        return self.evaluate(s).value

    def policy(self, s: GameState) -> dict[Action, float]:
        return self.evaluate(s).policy

    def best_action(self, s: GameState) -> Action | None:
        return argmax_action(self.evaluate(s).policy)

    def territory(self, s: GameState) -> tuple[float, ...] | None:
        return self.evaluate(s).territory

    def q(self, s: GameState, a: Action) -> float | None:
        """Action value for the turn player of ``s``; None if ``a`` is illegal.

        Uses the searched child statistics when ``a`` was visited and falls
        back to ``1 - V(T(s, a))`` otherwise.
        """
        if s.is_terminal:
            return None
        ev = self.evaluate(s)
        q = ev.action_values.get(a)
        if q is not None:
            return q
        try:
            child = s.play(a)
        except IllegalAction:
            return None
        return 1.0 - self.value(child)

    def quick_value(self, s: GameState) -> float:
        if s.is_terminal:
            return terminal_value(s)
        if self._quick is None:
            return self.value(s)
        k = ("quick", s.memo_key)
        v = self.store.get(k)
        if v is None:
            v = self.store[k] = self._quick(s).value
        self._quick_seen.add(k)
        return v

    def counters(self) -> tuple[int, int]:
        return self.evals, self.quick_evals


_ORACLE: ExactOracle | None = None


def shared_oracle() -> ExactOracle:
    """Process-wide solver; its tables only ever hold exact values, so sharing is safe."""
    global _ORACLE
    if _ORACLE is None:
        _ORACLE = ExactOracle()
    return _ORACLE


@dataclass(frozen=True)
class AgentSpec:
    """Serializable recipe for building a fresh :class:`Agent`."""

    kind: str = "mcts"
    simulations: int = 800
    puct_constant: float = 1.25
    seed: int = 0
    robust: bool = False
    engine_cmd: str | None = None
    timeout: float = 30.0

    def __post_init__(self):
        if self.kind not in ("mcts", "oracle", "engine"):
            raise ValueError(f"unknown agent kind {self.kind!r}")
        if self.kind == "engine" and not self.engine_cmd:
            raise ValueError("engine agents need engine_cmd")
        AgentConfig(self.simulations, self.puct_constant, self.seed)

    @property
    def config(self) -> AgentConfig:
        return AgentConfig(self.simulations, self.puct_constant, self.seed)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "AgentSpec":
        return cls(**d)

    def build(self, name: str = "agent", store: dict | None = None) -> Agent:
        if self.kind == "oracle":
            return Agent(shared_oracle().evaluate, None, name, store)
        if self.kind == "engine":
            from advstate.agents.bridge import EngineBridge

            bridge = EngineBridge(self.engine_cmd, visits=self.simulations, timeout=self.timeout)
            return Agent(bridge.evaluate, None, name, store)
        provider = HeuristicProvider(seed=self.seed)
        if self.robust:
            provider = RobustProvider(provider)
        search = PVMCTS(provider, self.config)
        return Agent(search.evaluate, provider, name, store)

    def label(self) -> str:
        if self.kind == "oracle":
            return "oracle"
        if self.kind == "engine":
            return f"engine:{self.simulations}"
        tag = "robust-" if self.robust else ""
        return f"{tag}mcts{self.simulations}-s{self.seed}"


def hinted_value(s_prime: GameState, hint: Action | None, examiner: Agent) -> float:
    """``max(V(s'), 1 - V(T(s', hint)))``; plain ``V(s')`` if the hint is illegal."""
    v = examiner.value(s_prime)
    if hint is None or s_prime.is_terminal:
        return v
    try:
        nxt = s_prime.play(hint)
    except IllegalAction:
        return v
    return max(v, 1.0 - examiner.value(nxt))


def reordered_history(history: tuple[Action, ...]) -> tuple[Action, ...] | None:
    """Swap the last two move pairs so a different move becomes the last one."""
    if len(history) < 4:
        return None
    h = history
    return h[:-4] + (h[-2], h[-1], h[-4], h[-3])


def robust_policy(s: GameState, provider: Callable[[GameState], PolicyValue]) -> PolicyValue:
    """Average the provider's policy over ``s`` and its reordered twin."""
    base = provider(s)
    alt = reordered_history(s.history)
    if alt is None:
        return base
    try:
        twin = GameState.from_history(s.size, s.rules, alt)
    except IllegalAction:
        return base
    if twin.board != s.board or twin.turn != s.turn or twin.is_terminal:
        return base
    other = provider(twin)
    legal = s.legal_actions()
    mixed = {a: 0.5 * (base.policy.get(a, 0.0) + other.policy.get(a, 0.0)) for a in legal}
    z = sum(mixed.values())
    if z <= 0:
        return base
    return PolicyValue(base.value, {a: p / z for a, p in mixed.items()})


class RobustProvider:
    def __init__(self, provider: Callable[[GameState], PolicyValue]):
        self.provider = provider

    def __call__(self, s: GameState) -> PolicyValue:
        return robust_policy(s, self.provider)
