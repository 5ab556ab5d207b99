"""Hand-written policy-value provider standing in for a trained network.

The provider is deliberately shallow: it reads only the current board, the
side to move and the last action. Like real policy networks it leans on the
last move, which is exactly the weakness the perturbation search exploits.
"""

from __future__ import annotations

import math
from functools import lru_cache

from advstate.agents.base import PolicyValue
from advstate.game import (
    EMPTY,
    Action,
    Color,
    GameState,
    _action_table,
    exact_territory,
    neighbor_table,
    pass_action,
)

_MASK = (1 << 64) - 1


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def _noise(h: int, p: int, seed: int) -> float:
    """Deterministic jitter in [-1, 1) from (position hash, point, seed)."""
    x = ((h ^ ((p + 1) * 0x9E3779B97F4A7C15) ^ (seed * 0xC2B2AE3D27D4EB4F)) * 0xFF51AFD7ED558CCD) & _MASK
    return ((x >> 40) & 0xFFFFFF) / float(1 << 23) - 1.0


def _softmax(scores: dict[Action, float], temperature: float) -> dict[Action, float]:
    if not scores:
        return {}
    top = max(scores.values())
    exp = {a: math.exp((v - top) / temperature) for a, v in scores.items()}
    z = 0.0
    for e in exp.values():
        z += e
    return {a: e / z for a, e in exp.items()}


def _last_point(s: GameState) -> int | None:
    last = s.last_action
    if last is None or last.point is None:
        return None
    return last.point[0] * s.size + last.point[1]


@lru_cache(maxsize=None)
def _distances(size: int) -> tuple[tuple[int, ...], ...]:
    n = size * size
    return tuple(
        tuple(abs(a // size - b // size) + abs(a % size - b % size) for b in range(n))
        for a in range(n)
    )


def _action_row(s: GameState):
    return _action_table(s.size)[s.turn]


class HeuristicProvider:
    """Static evaluation for Go and NoGo.

    ``last_move_weight`` controls how much the policy favours points near the
    previous move; ``noise`` adds seeded per-point jitter so different seeds
    give differently flawed providers.
    """

    def __init__(self, seed: int = 0, temperature: float = 1.0, last_move_weight: float = 0.8,
                 noise: float = 0.25):
        self.seed = seed
        self.temperature = temperature
        self.last_move_weight = last_move_weight
        self.noise = noise

    def __call__(self, s: GameState) -> PolicyValue:
        return self.evaluate(s)

    def config(self) -> dict:
        return {
            "seed": self.seed,
            "temperature": self.temperature,
            "last_move_weight": self.last_move_weight,
            "noise": self.noise,
        }

    def evaluate(self, s: GameState) -> PolicyValue:
        if s.rules.is_nogo:
            return self._nogo(s)
        return self._go(s)

    def _proximity_bonus(self, last: int | None, size: int) -> tuple[float, ...]:
        if last is None:
            return (0.0,) * (size * size)
        w = self.last_move_weight
        return tuple(w if d == 1 else 0.5 * w if d == 2 else 0.0 for d in _distances(size)[last])

    # -- NoGo ---------------------------------------------------------------

    def _nogo(self, s: GameState) -> PolicyValue:
        me = int(s.turn)
        sets = s._placement_sets
        mine = sets[me]
        theirs = sets[3 - me]
        only_me = len(mine - theirs)
        only_them = len(theirs - mine)
        shared = len(mine & theirs)
        # if shared points get used up alternately the mover gets the odd one
        margin = only_me - only_them + (shared & 1)
        value = _sigmoid(1.5 * (margin - 0.5) / (1.0 + shared / 8.0))

        board = s.board
        nbrs = neighbor_table(s.size)
        near = self._proximity_bonus(_last_point(s), s.size)
        h = s.position_hash
        seed = self.seed
        amp = self.noise
        acts = _action_row(s)
        # open sides of each opponent-playable point; sealing the last one makes an eye
        open_sides = {q: sum(1 for r in nbrs[q] if board[r] != me) for q in theirs}
        scores: dict[Action, float] = {}
        for p in s._legal_points:
            x = 1.0 if p in theirs else -1.0
            for q in nbrs[p]:
                if open_sides.get(q) == 1:
                    x += 0.8
            x += near[p] + amp * _noise(h, p, seed)
            scores[acts[p]] = x
        return PolicyValue(value, _softmax(scores, self.temperature))

    # -- Go -----------------------------------------------------------------

    def static_value(self, s: GameState) -> float:
        terr = exact_territory(s)
        black = sum(1 for t in terr if t > 0)
        white = sum(1 for t in terr if t < 0)
        settled = (black + white) / len(terr)
        diff = black - white - s.rules.komi * settled
        gid, libs, stones = s._chains
        me = int(s.turn)
        threat = 0.0
        for g, n in enumerate(libs):
            if n == 1:
                color = s.board[stones[g][0]]
                threat += len(stones[g]) if color != me else -0.5 * len(stones[g])
        if s.turn == Color.WHITE:
            diff = -diff
        return _sigmoid((diff + threat) / (0.5 * s.size))

    def _go(self, s: GameState) -> PolicyValue:
        value = self.static_value(s)
        me = int(s.turn)
        opp = 3 - me
        board = s.board
        size = s.size
        nbrs = neighbor_table(size)
        gid, libs, stones = s._chains
        terr = exact_territory(s)
        own_sign = 1.0 if me == Color.BLACK else -1.0
        near = self._proximity_bonus(_last_point(s), size)
        h = s.position_hash
        centre = (size - 1) / 2.0
        scores: dict[Action, float] = {}
        all_filled = True
        for p in s._legal_points:
            x = 0.0
            owner = terr[p] * own_sign
            if owner > 0:
                x -= 2.0
            elif owner < 0:
                x -= 0.5
            else:
                all_filled = False
            empties = 0
            own_libs = 0
            for q in nbrs[p]:
                v = board[q]
                if v == EMPTY:
                    empties += 1
                elif v == opp:
                    n = libs[gid[q]]
                    if n == 1:
                        x += 1.5 + 0.5 * len(stones[gid[q]])
                    elif n == 2:
                        x += 0.6
                else:
                    n = libs[gid[q]]
                    own_libs += n - 1
                    if n == 1:
                        x += 1.2
            if empties + own_libs <= 1:
                x -= 1.0
            r, c = divmod(p, size)
            x += 0.3 * (1.0 - (abs(r - centre) + abs(c - centre)) / (2 * centre or 1))
            x += near[p] + self.noise * _noise(h, p, self.seed)
            scores[s.action_at(s.turn, p)] = x
        scores[pass_action(s.turn)] = 1.0 if all_filled else -1.5
        return PolicyValue(value, _softmax(scores, self.temperature))
