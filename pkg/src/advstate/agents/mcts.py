"""PUCT tree search guided by a policy-value provider.

Selection uses ``Q + c * P * sqrt(N_parent) / (1 + N_child)``. The root is
expanded by the first simulation, so root child visits sum to
``simulations - 1``. Unvisited children take the parent's running value as
their first-play estimate. Every stored value is a win-rate in [0, 1]; child
statistics are kept from the point of view of the player choosing the move.
"""

from __future__ import annotations

import math
from typing import Callable

from advstate.agents.base import AgentConfig, Evaluation, PolicyValue
from advstate.agents.heuristic import HeuristicProvider
from advstate.game import Action, GameState, exact_territory

Provider = Callable[[GameState], PolicyValue]


def terminal_value(s: GameState) -> float:
    """Win-rate of the turn player at a terminal state (loss 0, draw 0.5, win 1)."""
    return (s.outcome().reward_for_turn_player + 1) / 2.0


class _Node:
    __slots__ = ("state", "actions", "priors", "child_n", "child_w", "children", "n", "w",
                 "terminal")

    def __init__(self, state: GameState):
        self.state = state
        self.actions: list[Action] = []
        self.priors: list[float] = []
        self.child_n: list[int] = []
        self.child_w: list[float] = []
        self.children: list[_Node | None] = []
        self.n = 0
        self.w = 0.0
        self.terminal = state.is_terminal

    def expand(self, pv: PolicyValue) -> None:
        acts = self.state.legal_actions()
        pol = pv.policy
        priors = [pol.get(a, 0.0) for a in acts]
        z = 0.0
        for p in priors:
            z += p
        if z > 0:
            priors = [p / z for p in priors]
        else:
            priors = [1.0 / len(acts)] * len(acts)
        self.actions = acts
        self.priors = priors
        self.child_n = [0] * len(acts)
        self.child_w = [0.0] * len(acts)
        self.children = [None] * len(acts)


class PVMCTS:
    """Policy-value MCTS agent. Pure function of (state, provider, config)."""

    def __init__(self, provider: Provider, cfg: AgentConfig | None = None, accelerate: bool = True):
        self.provider = provider
        self.cfg = cfg or AgentConfig()
        self.accelerate = accelerate

    def __call__(self, s: GameState) -> Evaluation:
        return self.evaluate(s)

    def evaluate(self, s: GameState) -> Evaluation:
        if s.is_terminal:
            raise ValueError("cannot search from a terminal state")
        if self.cfg.simulations > 1 and self._can_accelerate(s):
            return self._evaluate_compiled(s)
        pv = self.provider(s)
        if self.cfg.simulations == 1:
            return Evaluation(pv.value, dict(pv.policy), {}, self._static_territory(s), {})

        root = _Node(s)
        root.expand(pv)
        root.n = 1
        root.w = pv.value
        c_puct = self.cfg.puct_constant
        terr_sum: list[float] | None = None
        terr_hits = 0

        for _ in range(self.cfg.simulations - 1):
            node = root
            path: list[tuple[_Node, int]] = []
            while True:
                i = _select(node, c_puct)
                path.append((node, i))
                child = node.children[i]
                if child is None:
                    child = _Node(node.state.play(node.actions[i]))
                    node.children[i] = child
                    break
                node = child
                if node.terminal:
                    break
            leaf = child
            if leaf.terminal:
                v = terminal_value(leaf.state)
                if leaf.state.rules.is_go:
                    t = exact_territory(leaf.state)
                    if terr_sum is None:
                        terr_sum = list(t)
                    else:
                        for k, x in enumerate(t):
                            terr_sum[k] += x
                    terr_hits += 1
            else:
                lpv = self.provider(leaf.state)
                leaf.expand(lpv)
                v = lpv.value
            leaf.n += 1
            leaf.w += v
            # v is from the leaf's turn player; flip once per ply going up
            for parent, i in reversed(path):
                v = 1.0 - v
                parent.child_n[i] += 1
                parent.child_w[i] += v
                parent.n += 1
                parent.w += v

        total = sum(root.child_n)
        policy = {a: n / total for a, n in zip(root.actions, root.child_n)}
        q = {a: w / n for a, n, w in zip(root.actions, root.child_n, root.child_w) if n > 0}
        visits = {a: n for a, n in zip(root.actions, root.child_n) if n > 0}
        if terr_hits:
            territory = tuple(x / terr_hits for x in terr_sum)
        else:
            territory = self._static_territory(s)
        return Evaluation(root.w / root.n, policy, q, territory, visits)

    def _can_accelerate(self, s: GameState) -> bool:
        return self.accelerate and s.rules.is_nogo and type(self.provider) is HeuristicProvider

    def _evaluate_compiled(self, s: GameState) -> Evaluation:
        from advstate.agents.fast_nogo import search_nogo

        hp = self.provider
        w, n, points, visits, sums = search_nogo(s, self.cfg.simulations, self.cfg.puct_constant, hp.seed,
                                                 hp.last_move_weight, hp.noise, hp.temperature)
        actions = [s.action_at(s.turn, int(p)) for p in points]
        counts = [int(x) for x in visits]
        sums = [float(x) for x in sums]
        total = sum(counts)
        policy = {a: c / total for a, c in zip(actions, counts)}
        q = {a: x / c for a, c, x in zip(actions, counts, sums) if c > 0}
        visited = {a: c for a, c in zip(actions, counts) if c > 0}
        return Evaluation(float(w) / int(n), policy, q, None, visited)

    @staticmethod
    def _static_territory(s: GameState) -> tuple[float, ...] | None:
        return exact_territory(s) if s.rules.is_go else None


def _select(node: _Node, c_puct: float) -> int:
    sqrt_n = math.sqrt(node.n)
    fpu = node.w / node.n if node.n else 0.5
    best = 0
    best_score = -math.inf
    ns = node.child_n
    ws = node.child_w
    ps = node.priors
    for i in range(len(ns)):
        n = ns[i]
        q = ws[i] / n if n else fpu
        score = q + c_puct * ps[i] * sqrt_n / (1 + n)
        if score > best_score:
            best_score = score
            best = i
    return best


def pv_mcts_evaluate(s: GameState, provider: Provider, cfg: AgentConfig) -> Evaluation:
    return PVMCTS(provider, cfg).evaluate(s)
