"""Fixed-width text diagrams of boards with overlay markers.

Stones are ``X`` (Black) and ``O`` (White), empty points ``.``. Column labels
skip the letter I as on real boards; rows count up from the bottom. A marker
replaces whatever is underneath it, stone included. When several markers land
on one point the one earliest in :data:`PRECEDENCE` wins.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from advstate.game import EMPTY, Color

COLUMN_LETTERS = "ABCDEFGHJKLMNOPQRST"
STONES = {EMPTY: ".", int(Color.BLACK): "X", int(Color.WHITE): "O"}
# perturbation stones, then target moves, then the examiner's best move
PRECEDENCE = ("1", "2", "A", "B", "*")


@dataclass(frozen=True)
class RenderSpec:
    size: int
    board: tuple[int, ...]
    markers: tuple[tuple[tuple[int, int], str], ...] = ()
    title: str = ""
    legend: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if len(self.board) != self.size * self.size:
            raise ValueError("board length does not match size")
        for (r, c), glyph in self.markers:
            if not (0 <= r < self.size and 0 <= c < self.size):
                raise ValueError(f"marker {glyph!r} at {(r, c)} is off the board")
            if glyph not in PRECEDENCE:
                raise ValueError(f"unknown marker glyph {glyph!r}")


def column_label(c: int) -> str:
    return COLUMN_LETTERS[c]


def point_label(point: tuple[int, int] | None, size: int) -> str:
    """Human label like ``C3``; row 1 is the bottom row."""
    if point is None:
        return "pass"
    r, c = point
    return f"{column_label(c)}{size - r}"


def render_board(spec: RenderSpec) -> str:
    n = spec.size
    rank = {g: i for i, g in enumerate(PRECEDENCE)}
    overlay: dict[tuple[int, int], str] = {}
    for point, glyph in spec.markers:
        cur = overlay.get(point)
        if cur is None or rank[glyph] < rank[cur]:
            overlay[point] = glyph
    width = len(str(n))
    header = " " * (width + 2) + " ".join(column_label(c) for c in range(n))
    lines = []
    if spec.title:
        lines.append(spec.title)
    lines.append(header)
    for r in range(n):
        label = str(n - r).rjust(width)
        cells = []
        for c in range(n):
            glyph = overlay.get((r, c))
            cells.append(glyph if glyph is not None else STONES[spec.board[r * n + c]])
        lines.append(f"{label}  {' '.join(cells)}  {label}")
    lines.append(header)
    lines.extend(spec.legend)
    return "\n".join(lines) + "\n"
