"""Exact negamax solver used as a ground-truth examiner on tiny boards."""

from __future__ import annotations

import sys

from advstate.agents.base import Evaluation
from advstate.agents.mcts import terminal_value
from advstate.game import GameState, exact_territory


class ResourceExceeded(RuntimeError):
    pass


def _memo_key(s: GameState):
    if s.rules.is_nogo:
        # NoGo futures depend on the board and the side to move only
        return s.position_hash
    return (s.position_hash, s.consecutive_passes, len(s.history))


class _NoGoBitSolver:
    """Win/loss solver for NoGo on boards up to 4x4 using bitmasks.

    Positions are keyed on (stones of the player to move, opponent stones),
    canonicalised over the eight board symmetries.
    """

    def __init__(self, size: int):
        if size > 4:
            raise ValueError("bit solver supports boards up to 4x4")
        self.size = size
        n = size * size
        self.full = (1 << n) - 1
        self.col0 = sum(1 << (r * size) for r in range(size))
        self.coln = sum(1 << (r * size + size - 1) for r in range(size))
        self.memo: dict[int, bool] = {}
        self._tables = self._symmetry_tables()

    def _symmetry_tables(self):
        n = self.size
        maps = []
        for k in range(8):
            perm = []
            for p in range(n * n):
                r, c = divmod(p, n)
                for _ in range(k % 4):
                    r, c = c, n - 1 - r
                if k >= 4:
                    c = n - 1 - c
                perm.append(r * n + c)
            maps.append(perm)
        tables = []
        for perm in maps:
            lo = [0] * 256
            hi = [0] * 256
            for x in range(256):
                a = b = 0
                for bit in range(8):
                    if x >> bit & 1:
                        if bit < len(perm):
                            a |= 1 << perm[bit]
                        if bit + 8 < len(perm):
                            b |= 1 << perm[bit + 8]
                lo[x] = a
                hi[x] = b
            tables.append((lo, hi))
        return tables

    def _canon(self, me: int, op: int) -> int:
        best = -1
        for lo, hi in self._tables:
            k = ((lo[me & 255] | hi[me >> 8]) << 16) | lo[op & 255] | hi[op >> 8]
            if best < 0 or k < best:
                best = k
        return best

    def _nb(self, x: int) -> int:
        n = self.size
        return ((x >> n) | (x << n) | ((x & ~self.col0) >> 1) | ((x & ~self.coln) << 1)) & self.full

    def _chain(self, seed: int, own: int) -> int:
        c = seed
        while True:
            grown = (c | self._nb(c)) & own
            if grown == c:
                return c
            c = grown

    def legal(self, me: int, op: int, p: int) -> bool:
        b = 1 << p
        if (me | op) & b:
            return False
        me2 = me | b
        empty = self.full & ~(me2 | op)
        if not self._nb(self._chain(b, me2)) & empty:
            return False
        adj = self._nb(b) & op
        while adj:
            low = adj & -adj
            c = self._chain(low, op)
            if not self._nb(c) & empty:
                return False
            adj &= ~c
        return True

    def wins(self, me: int, op: int) -> bool:
        key = self._canon(me, op)
        r = self.memo.get(key)
        if r is not None:
            return r
        r = False
        for p in range(self.size * self.size):
            if self.legal(me, op, p) and not self.wins(op, me | (1 << p)):
                r = True
                break
        self.memo[key] = r
        return r


class ExactOracle:
    """Game-theoretic values in {0, 0.5, 1} for the player to move.

    Values are memoised on the position hash (plus pass count and move number
    under Go, where the move cap and double-pass rule make them matter). Go
    superko is taken from the path that first reached a position, which is
    exact for the small, capped trees this solver is meant for.
    """

    def __init__(self, max_entries: int = 2_000_000, use_bitboards: bool = True):
        self.max_entries = max_entries
        self.use_bitboards = use_bitboards
        self.memo: dict = {}
        self._bit: dict[int, _NoGoBitSolver] = {}

    def __call__(self, s: GameState) -> Evaluation:
        return self.evaluate(s)

    def value(self, s: GameState) -> float:
        if self.use_bitboards and s.rules.is_nogo and s.size <= 4:
            return self._bit_value(s)
        limit = sys.getrecursionlimit()
        need = 4 * (len(s.board) * 3 + 50)
        if limit < need:
            sys.setrecursionlimit(need)
        return self._solve(s)

    def _bit_value(self, s: GameState) -> float:
        solver = self._bit.get(s.size)
        if solver is None:
            solver = self._bit[s.size] = _NoGoBitSolver(s.size)
        me = op = 0
        for p, v in enumerate(s.board):
            if v == s.turn:
                me |= 1 << p
            elif v:
                op |= 1 << p
        limit = sys.getrecursionlimit()
        if limit < 1000:
            sys.setrecursionlimit(1000)
        win = solver.wins(me, op)
        if len(solver.memo) > self.max_entries:
            raise ResourceExceeded(f"oracle memo exceeded {self.max_entries} entries")
        return 1.0 if win else 0.0

    @property
    def entries(self) -> int:
        return len(self.memo) + sum(len(b.memo) for b in self._bit.values())

    def _solve(self, s: GameState) -> float:
        key = _memo_key(s)
        v = self.memo.get(key)
        if v is not None:
            return v
        if s.is_terminal:
            v = terminal_value(s)
        else:
            v = 0.0
            for a in s.legal_actions():
                child = 1.0 - self._solve(s.play(a))
                if child > v:
                    v = child
                    if v == 1.0:
                        break
        if len(self.memo) >= self.max_entries:
            raise ResourceExceeded(f"oracle memo exceeded {self.max_entries} entries")
        self.memo[key] = v
        return v

    def evaluate(self, s: GameState) -> Evaluation:
        if s.is_terminal:
            raise ValueError("cannot evaluate a terminal state")
        q = {a: 1.0 - self.value(s.play(a)) for a in s.legal_actions()}
        best = max(q.values())
        optimal = [a for a, x in q.items() if x == best]
        policy = {a: (1.0 / len(optimal) if a in optimal else 0.0) for a in q}
        territory = exact_territory(s) if s.rules.is_go else None
        return Evaluation(best, policy, q, territory, {})
