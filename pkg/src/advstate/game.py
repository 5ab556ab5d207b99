"""Rules engine for Go and NoGo on small square boards.

States are immutable. Every transition returns a new :class:`GameState`; the
input is never modified, so states can be shared freely between search trees,
caches and worker processes.

Go uses area (Tromp-Taylor style) scoring after two consecutive passes and
positional superko keyed on (board, turn). NoGo forbids captures and suicide;
the player to move with no legal placement loses.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, NamedTuple, Sequence

EMPTY = 0
MIN_SIZE = 2
MAX_SIZE = 19


class IllegalAction(ValueError):
    pass


class Color(enum.IntEnum):
    BLACK = 1
    WHITE = 2

    __hash__ = int.__hash__

    @property
    def opponent(self) -> "Color":
        return Color(3 - self)

    @property
    def letter(self) -> str:
        return "B" if self is Color.BLACK else "W"


def opponent(color: Color) -> Color:
    return Color(3 - color)


class Action(NamedTuple):
    """A colored stone placement, or a pass when ``point`` is None."""

    color: Color
    point: tuple[int, int] | None = None

    @property
    def is_pass(self) -> bool:
        return self.point is None

    def sort_key(self) -> tuple[int, int, int]:
        # placements in (row, col) order, pass last
        if self.point is None:
            return (1, 0, 0)
        return (0, self.point[0], self.point[1])

    def __str__(self) -> str:
        if self.point is None:
            return f"{self.color.letter}:pass"
        return f"{self.color.letter}:{self.point[0]},{self.point[1]}"


def pass_action(color: Color) -> Action:
    return Action(Color(color), None)


def parse_action(text: str) -> Action:
    """Inverse of ``str(Action)``: ``B:2,3`` or ``W:pass``."""
    try:
        letter, rest = text.split(":")
        color = {"B": Color.BLACK, "W": Color.WHITE}[letter]
        if rest == "pass":
            return pass_action(color)
        r, c = rest.split(",")
        return Action(color, (int(r), int(c)))
    except (ValueError, KeyError):
        raise ValueError(f"bad action text {text!r}") from None


@dataclass(frozen=True)
class Rules:
    game: str = "go"
    komi: float = 7.0
    superko: bool = True
    max_moves: int | None = None

    def __post_init__(self):
        if self.game not in ("go", "nogo"):
            raise ValueError(f"unknown game {self.game!r}")

    @property
    def is_go(self) -> bool:
        return self.game == "go"

    @property
    def is_nogo(self) -> bool:
        return self.game == "nogo"

    def move_cap(self, size: int) -> int | None:
        if not self.is_go:
            return None
        return self.max_moves if self.max_moves is not None else 3 * size * size


def default_komi(size: int) -> float:
    return 7.0 if size % 2 == 1 else 0.5


def go_rules(size: int, komi: float | None = None, **kw) -> Rules:
    return Rules("go", default_komi(size) if komi is None else float(komi), **kw)


def nogo_rules() -> Rules:
    return Rules("nogo", komi=0.0, superko=False)


class GameOutcome(NamedTuple):
    reward_for_turn_player: int
    terminal: bool


_ZOBRIST_RNG = random.Random(20220117)
_ZOBRIST = [
    (0, _ZOBRIST_RNG.getrandbits(64), _ZOBRIST_RNG.getrandbits(64))
    for _ in range(MAX_SIZE * MAX_SIZE)
]
_WHITE_TO_MOVE = _ZOBRIST_RNG.getrandbits(64)


@lru_cache(maxsize=None)
def neighbor_table(size: int) -> tuple[tuple[int, ...], ...]:
    out = []
    for p in range(size * size):
        r, c = divmod(p, size)
        nb = []
        if r > 0:
            nb.append(p - size)
        if r < size - 1:
            nb.append(p + size)
        if c > 0:
            nb.append(p - 1)
        if c < size - 1:
            nb.append(p + 1)
        out.append(tuple(nb))
    return tuple(out)


@lru_cache(maxsize=None)
def _action_table(size: int) -> tuple[tuple[Action, ...], ...]:
    # index 0 unused, [color][point] -> shared Action instance
    table: list[tuple[Action, ...]] = [()]
    for color in (Color.BLACK, Color.WHITE):
        table.append(tuple(Action(color, divmod(p, size)) for p in range(size * size)))
    return tuple(table)


def board_hash(board: Sequence[int], turn: Color) -> int:
    h = 0
    for p, v in enumerate(board):
        if v:
            h ^= _ZOBRIST[p][v]
    if turn == Color.WHITE:
        h ^= _WHITE_TO_MOVE
    return h


@dataclass(frozen=True)
class GameState:
    size: int
    rules: Rules
    board: tuple[int, ...]
    turn: Color
    history: tuple[Action, ...] = ()
    position_hash: int = 0
    consecutive_passes: int = 0
    seen: frozenset = field(default=frozenset(), repr=False, compare=False)

    # -- construction -----------------------------------------------------

    @classmethod
    def new(cls, size: int, rules: Rules | None = None) -> "GameState":
        if not MIN_SIZE <= size <= MAX_SIZE:
            raise ValueError(f"board size {size} out of range")
        rules = rules or go_rules(size)
        board = (EMPTY,) * (size * size)
        h = board_hash(board, Color.BLACK)
        return cls(size, rules, board, Color.BLACK, (), h, 0, frozenset((h,)))

    @classmethod
    def from_history(cls, size: int, rules: Rules, actions: Iterable[Action]) -> "GameState":
        s = cls.new(size, rules)
        for a in actions:
            s = s.play(a)
        return s

    @classmethod
    def from_setup(cls, size: int, rules: Rules, board: Sequence[int], turn: Color = Color.BLACK) -> "GameState":
        """Start position with pre-placed stones and no history."""
        board = tuple(int(v) for v in board)
        if len(board) != size * size:
            raise ValueError("setup board has the wrong number of points")
        h = board_hash(board, turn)
        return cls(size, rules, board, Color(turn), (), h, 0, frozenset((h,)))

    # -- coordinates ------------------------------------------------------

    def index(self, point: tuple[int, int]) -> int:
        r, c = point
        if not (0 <= r < self.size and 0 <= c < self.size):
            raise IllegalAction(f"point {point} is off the board")
        return r * self.size + c

    def at(self, point: tuple[int, int]) -> int:
        return self.board[self.index(point)]

    def action_at(self, color: Color, p: int) -> Action:
        return _action_table(self.size)[color][p]

    @property
    def last_action(self) -> Action | None:
        return self.history[-1] if self.history else None

    @property
    def key(self) -> tuple:
        """Cache key: position hash plus what history-sensitive evaluators read."""
        return (self.position_hash, len(self.history), self.consecutive_passes, self.last_action)

    @property
    def memo_key(self) -> tuple:
        """Like :attr:`key` but also pins the superko history when it can change legality."""
        if self.rules.is_go and self.rules.superko:
            return (self.key, self.seen)
        return self.key

    # -- chain analysis (cached per state) --------------------------------

    @cached_property
    def _chains(self) -> tuple[list[int], list[int], list[tuple[int, ...]]]:
        """Chain id per point (-1 for empty), liberty count and stones per chain."""
        board = self.board
        nbrs = neighbor_table(self.size)
        gid = [-1] * len(board)
        libs: list[int] = []
        stones: list[tuple[int, ...]] = []
        for p, v in enumerate(board):
            if v == EMPTY or gid[p] >= 0:
                continue
            g = len(libs)
            gid[p] = g
            members = [p]
            lib_set = set()
            stack = [p]
            while stack:
                q = stack.pop()
                for r in nbrs[q]:
                    w = board[r]
                    if w == EMPTY:
                        lib_set.add(r)
                    elif w == v and gid[r] < 0:
                        gid[r] = g
                        members.append(r)
                        stack.append(r)
            libs.append(len(lib_set))
            stones.append(tuple(members))
        return gid, libs, stones

    def _placement_effect(self, p: int, color: int) -> tuple[bool, bool, list[int]] | None:
        """(captures, suicide, captured stones) for placing ``color`` at empty ``p``."""
        board = self.board
        if board[p] != EMPTY:
            return None
        gid, libs, stones = self._chains
        opp = 3 - color
        has_empty = False
        own_safe = False
        captured_groups = set()
        for q in neighbor_table(self.size)[p]:
            v = board[q]
            if v == EMPTY:
                has_empty = True
            elif v == color:
                if libs[gid[q]] > 1:
                    own_safe = True
            elif libs[gid[q]] == 1:
                captured_groups.add(gid[q])
        captured = [x for g in sorted(captured_groups) for x in stones[g]]
        suicide = not (has_empty or own_safe or captured)
        return bool(captured), suicide, captured

    def placement_ok(self, p: int, color: int) -> bool:
        """Capture/suicide legality of a placement, ignoring turn and superko."""
        return p in self._placement_sets[color]

    @cached_property
    def _placement_sets(self) -> tuple[frozenset, frozenset, frozenset]:
        """Per color, the points allowed by capture/suicide rules (index 0 unused)."""
        board = self.board
        gid, libs, _ = self._chains
        nbrs = neighbor_table(self.size)
        nogo = self.rules.is_nogo
        black = []
        white = []
        for p, v in enumerate(board):
            if v != EMPTY:
                continue
            has_empty = b_safe = w_safe = b_cap = w_cap = False
            for q in nbrs[p]:
                x = board[q]
                if x == EMPTY:
                    has_empty = True
                elif x == 1:
                    if libs[gid[q]] > 1:
                        b_safe = True
                    else:
                        w_cap = True
                else:
                    if libs[gid[q]] > 1:
                        w_safe = True
                    else:
                        b_cap = True
            if nogo:
                if not b_cap and (has_empty or b_safe):
                    black.append(p)
                if not w_cap and (has_empty or w_safe):
                    white.append(p)
            else:
                if has_empty or b_safe or b_cap:
                    black.append(p)
                if has_empty or w_safe or w_cap:
                    white.append(p)
        return frozenset(), frozenset(black), frozenset(white)

    def placement_points(self, color: int) -> tuple[int, ...]:
        """Points where ``color`` may place a stone by capture/suicide rules alone."""
        return tuple(sorted(self._placement_sets[color]))

    def _superko_hash(self, p: int, color: int, captured: list[int]) -> int:
        h = self.position_hash ^ _ZOBRIST[p][color] ^ _WHITE_TO_MOVE
        opp = 3 - color
        for q in captured:
            h ^= _ZOBRIST[q][opp]
        return h

    @cached_property
    def _legal_points(self) -> tuple[int, ...]:
        color = int(self.turn)
        pts = tuple(sorted(self._placement_sets[color]))
        if not (self.rules.is_go and self.rules.superko):
            return pts
        out = []
        for p in pts:
            _, _, captured = self._placement_effect(p, color)
            if self._superko_hash(p, color, captured) not in self.seen:
                out.append(p)
        return tuple(out)

    # -- rules API --------------------------------------------------------

    @cached_property
    def is_terminal(self) -> bool:
        if self.rules.is_go:
            if self.consecutive_passes >= 2:
                return True
            cap = self.rules.move_cap(self.size)
            return cap is not None and len(self.history) >= cap
        return not self._legal_points

    def legal_actions(self) -> list[Action]:
        if self.is_terminal:
            return []
        table = _action_table(self.size)[self.turn]
        acts = [table[p] for p in self._legal_points]
        if self.rules.is_go:
            acts.append(pass_action(self.turn))
        return acts

    def is_legal(self, a: Action) -> bool:
        try:
            self.play(a)
        except IllegalAction:
            return False
        return True

    def play(self, a: Action) -> "GameState":
        if a.color != self.turn:
            raise IllegalAction(f"{a} played but {self.turn.name} is to move")
        if self.is_terminal and self.rules.is_go:
            raise IllegalAction("game is over")
        if a.point is None:
            return self._pass()
        p = self.index(a.point)
        return self._place(p, a)

    def _pass(self) -> "GameState":
        # NoGo never offers pass to players but accepts it as a construction step
        h = self.position_hash ^ _WHITE_TO_MOVE
        return GameState(
            self.size,
            self.rules,
            self.board,
            self.turn.opponent,
            self.history + (pass_action(self.turn),),
            h,
            self.consecutive_passes + 1,
            self.seen | {h},
        )

    def _place(self, p: int, a: Action) -> "GameState":
        color = int(a.color)
        eff = self._placement_effect(p, color)
        if eff is None:
            raise IllegalAction(f"{a}: point occupied")
        captures, suicide, captured = eff
        if suicide:
            raise IllegalAction(f"{a}: suicide")
        if captures and self.rules.is_nogo:
            raise IllegalAction(f"{a}: capture is forbidden in NoGo")
        h = self._superko_hash(p, color, captured)
        if self.rules.is_go and self.rules.superko and h in self.seen:
            raise IllegalAction(f"{a}: positional superko")
        board = list(self.board)
        board[p] = color
        for q in captured:
            board[q] = EMPTY
        return GameState(
            self.size,
            self.rules,
            tuple(board),
            self.turn.opponent,
            self.history + (a,),
            h,
            0,
            self.seen | {h},
        )

    # -- scoring ----------------------------------------------------------

    def area(self) -> tuple[int, int]:
        terr = exact_territory(self)
        black = sum(1 for t in terr if t > 0)
        white = sum(1 for t in terr if t < 0)
        return black, white

    def score(self) -> float:
        """Black area minus white area minus komi."""
        b, w = self.area()
        return b - w - self.rules.komi

    def outcome(self) -> GameOutcome:
        if not self.is_terminal:
            return GameOutcome(0, False)
        if self.rules.is_nogo:
            return GameOutcome(-1, True)
        sc = self.score()
        if sc == 0:
            return GameOutcome(0, True)
        black_wins = sc > 0
        win = black_wins == (self.turn == Color.BLACK)
        return GameOutcome(1 if win else -1, True)

    def winner(self) -> Color | None:
        out = self.outcome()
        if not out.terminal or out.reward_for_turn_player == 0:
            return None
        return self.turn if out.reward_for_turn_player > 0 else self.turn.opponent

    # -- display ----------------------------------------------------------

    def __str__(self) -> str:
        glyph = {EMPTY: ".", Color.BLACK: "X", Color.WHITE: "O"}
        rows = []
        for r in range(self.size):
            rows.append(" ".join(glyph[v] for v in self.board[r * self.size:(r + 1) * self.size]))
        return "\n".join(rows)


def new_game(size: int, rules: Rules | None = None) -> GameState:
    return GameState.new(size, rules)


def apply_action(s: GameState, a: Action) -> GameState:
    return s.play(a)


def legal_actions(s: GameState) -> list[Action]:
    return s.legal_actions()


def terminal_result(s: GameState) -> GameOutcome:
    return s.outcome()


def skip_play(s: GameState, a: Action) -> GameState:
    """Play ``a`` without changing whose turn it is, inserting a pass."""
    if a.color == s.turn:
        return s.play(a).play(pass_action(s.turn.opponent))
    return s.play(pass_action(s.turn)).play(a)


def exact_territory(s: GameState) -> tuple[float, ...]:
    """Flood-fill area ownership: +1 black, -1 white, 0 neutral, per point."""
    board = s.board
    nbrs = neighbor_table(s.size)
    out = [0.0] * len(board)
    visited = [False] * len(board)
    for p, v in enumerate(board):
        if v == Color.BLACK:
            out[p] = 1.0
        elif v == Color.WHITE:
            out[p] = -1.0
        elif not visited[p]:
            region = [p]
            visited[p] = True
            borders = set()
            stack = [p]
            while stack:
                q = stack.pop()
                for r in nbrs[q]:
                    w = board[r]
                    if w == EMPTY:
                        if not visited[r]:
                            visited[r] = True
                            region.append(r)
                            stack.append(r)
                    else:
                        borders.add(w)
            if len(borders) == 1:
                owner = 1.0 if Color.BLACK in borders else -1.0
                for q in region:
                    out[q] = owner
    return tuple(out)


def replay(size: int, rules: Rules, actions: Iterable[Action]) -> list[GameState]:
    """All states s_0..s_T of a move sequence."""
    states = [GameState.new(size, rules)]
    for a in actions:
        states.append(states[-1].play(a))
    return states


def parse_board(text: str, rules: Rules | None = None, turn: Color = Color.BLACK) -> GameState:
    """Build a state from a diagram of ``.``/``X``/``O`` rows (no history).

    Meant for tests and hand-made positions; superko history starts fresh.
    """
    rows = [r.replace(" ", "") for r in text.strip().splitlines() if r.strip()]
    size = len(rows)
    vals = {".": EMPTY, "X": int(Color.BLACK), "O": int(Color.WHITE)}
    board = tuple(vals[ch] for row in rows for ch in row)
    if len(board) != size * size:
        raise ValueError("board diagram is not square")
    return GameState.from_setup(size, rules or go_rules(size), board, turn)
