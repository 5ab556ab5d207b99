"""Game records: a rules setup plus a move list, replayed into states."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from advstate.game import Action, Color, GameState, IllegalAction, Rules


class IllegalMove(ValueError):
    """A recorded move is illegal; ``index`` is its position in the move list."""

    def __init__(self, index: int, action: Action, reason: str = ""):
        super().__init__(f"move {index} ({action}) is illegal: {reason}")
        self.index = index
        self.action = action


@dataclass(frozen=True)
class GameRecord:
    size: int
    rules: Rules
    actions: tuple[Action, ...]
    game_id: str = ""
    setup: tuple[int, ...] | None = None
    first_turn: Color = Color.BLACK
    metadata: dict = field(default_factory=dict, compare=False, hash=False)

    def initial_state(self) -> GameState:
        if self.setup is None and self.first_turn == Color.BLACK:
            return GameState.new(self.size, self.rules)
        board = self.setup or (0,) * (self.size * self.size)
        return GameState.from_setup(self.size, self.rules, board, self.first_turn)

    @cached_property
    def states(self) -> list[GameState]:
        """States s_0..s_T; raises :class:`IllegalMove` on the first bad move."""
        s = self.initial_state()
        out = [s]
        for i, a in enumerate(self.actions):
            try:
                s = s.play(a)
            except IllegalAction as e:
                raise IllegalMove(i, a, str(e)) from None
            out.append(s)
        return out

    def __len__(self) -> int:
        return len(self.actions) + 1

    def validate(self) -> None:
        self.states  # noqa: B018  (replay raises on the first illegal move)
