"""Reading and writing game records in SGF (FF[4], main line only).

File coordinates use the usual lowercase pair ``xy`` with ``a`` = first
column/row counted from the top-left, and ``i`` is a normal letter there.
The letter ``i`` is skipped only in human-facing labels (see ``render``).
Pass is written as an empty value ``B[]``; ``tt`` is also read as pass.
"""

from __future__ import annotations

from advstate.game import Action, Color, Rules, go_rules, nogo_rules, pass_action
from advstate.record import GameRecord

KNOWN = {"GM", "SZ", "KM", "RU", "B", "W", "C", "AB", "AW", "PL", "FF"}


class ParseError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{msg} at line {line}, column {col}")
        self.line = line
        self.col = col


def _tokens(text: str):
    """Yield (kind, value, line, col) with kind in '(' ')' ';' 'prop'."""
    i = 0
    line, col = 1, 1
    n = len(text)

    def advance(ch):
        nonlocal line, col
        if ch == "\n":
            line += 1
            col = 1
        else:
            col += 1

    while i < n:
        ch = text[i]
        if ch.isspace():
            advance(ch)
            i += 1
            continue
        if ch in "();":
            yield ch, None, line, col
            advance(ch)
            i += 1
            continue
        if ch.isalpha() and ch.isupper():
            start_line, start_col = line, col
            j = i
            while j < n and text[j].isalpha():
                j += 1
            ident = "".join(c for c in text[i:j] if c.isupper())
            for c in text[i:j]:
                advance(c)
            i = j
            values = []
            while True:
                while i < n and text[i].isspace():
                    advance(text[i])
                    i += 1
                if i >= n or text[i] != "[":
                    break
                advance("[")
                i += 1
                buf = []
                while True:
                    if i >= n:
                        raise ParseError("unterminated property value", line, col)
                    c = text[i]
                    if c == "\\" and i + 1 < n:
                        advance(c)
                        advance(text[i + 1])
                        buf.append(text[i + 1])
                        i += 2
                        continue
                    if c == "]":
                        advance(c)
                        i += 1
                        break
                    buf.append(c)
                    advance(c)
                    i += 1
                values.append("".join(buf))
            if not values:
                raise ParseError(f"property {ident} has no value", start_line, start_col)
            yield "prop", (ident, values), start_line, start_col
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)


def _nodes(text: str) -> list[list[tuple[str, list[str], int, int]]]:
    """Main-line nodes of the first game tree; later variations are ignored."""
    toks = list(_tokens(text))
    if not toks or toks[0][0] != "(":
        line, col = (toks[0][2], toks[0][3]) if toks else (1, 1)
        raise ParseError("expected '('", line, col)
    nodes: list[list] = []
    depth = 0
    skipping_from: int | None = None
    saw_branch_at: dict[int, bool] = {}
    for kind, val, line, col in toks:
        if kind == "(":
            depth += 1
            if skipping_from is None and saw_branch_at.get(depth):
                skipping_from = depth
            continue
        if kind == ")":
            saw_branch_at[depth] = True
            if skipping_from == depth:
                skipping_from = None
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced ')'", line, col)
            if depth == 0:
                break
            continue
        if skipping_from is not None:
            continue
        if kind == ";":
            nodes.append([])
            continue
        if not nodes:
            raise ParseError("property before the first node", line, col)
        ident, values = val
        nodes[-1].append((ident, values, line, col))
    if depth != 0:
        last = toks[-1]
        raise ParseError("unbalanced '('", last[2], last[3])
    if not nodes:
        raise ParseError("empty game tree", 1, 1)
    return nodes


def _point(value: str, size: int, line: int, col: int) -> tuple[int, int] | None:
    if value == "" or (value == "tt" and size <= 19):
        return None
    if len(value) != 2:
        raise ParseError(f"bad coordinate {value!r}", line, col)
    c = ord(value[0]) - ord("a")
    r = ord(value[1]) - ord("a")
    if not (0 <= r < size and 0 <= c < size):
        raise ParseError(f"coordinate {value!r} is off a {size}x{size} board", line, col)
    return (r, c)


def point_to_sgf(point: tuple[int, int] | None) -> str:
    if point is None:
        return ""
    r, c = point
    return chr(ord("a") + c) + chr(ord("a") + r)


def _escape(v: str) -> str:
    return v.replace("\\", "\\\\").replace("]", "\\]")


def parse_sgf(text: str, game_id: str = "") -> GameRecord:
    """Parse the main line into a :class:`GameRecord` and replay it.

    Raises :class:`ParseError` for malformed text and
    :class:`~advstate.record.IllegalMove` for the first illegal move.
    """
    nodes = _nodes(text)
    root = nodes[0]
    props = {}
    for ident, values, line, col in root:
        props.setdefault(ident, (values, line, col))

    def one(key, default=None):
        return props[key][0][0] if key in props else default

    gm = one("GM", "1")
    if gm != "1":
        values, line, col = props["GM"]
        raise ParseError(f"unsupported game type GM[{gm}]", line, col)
    try:
        size = int(one("SZ", "19"))
    except ValueError:
        _, line, col = props["SZ"]
        raise ParseError("SZ is not an integer", line, col) from None
    ru = one("RU", "")
    is_nogo = "nogo" in ru.lower()
    komi_text = one("KM")
    try:
        komi = float(komi_text) if komi_text is not None else None
    except ValueError:
        _, line, col = props["KM"]
        raise ParseError("KM is not a number", line, col) from None
    if is_nogo:
        rules = nogo_rules()
    else:
        rules = go_rules(size, komi)

    setup = [0] * (size * size)
    has_setup = False
    for key, color in (("AB", Color.BLACK), ("AW", Color.WHITE)):
        if key in props:
            values, line, col = props[key]
            for v in values:
                p = _point(v, size, line, col)
                if p is None:
                    raise ParseError(f"{key} with an empty point", line, col)
                setup[p[0] * size + p[1]] = int(color)
                has_setup = True
    first = Color.BLACK
    if "PL" in props:
        first = Color.WHITE if one("PL").upper().startswith("W") else Color.BLACK

    meta: dict = {"ruleset": ru}
    if "C" in props:
        meta["comment"] = one("C")
    unknown_root = [(i, v) for i, v, _, _ in root if i not in KNOWN]
    if unknown_root:
        meta["root_props"] = unknown_root
    for key, name in (("PB", "black"), ("PW", "white")):
        if key in props:
            meta[name] = one(key)

    actions: list[Action] = []
    move_comments: dict[int, str] = {}
    move_props: dict[int, list] = {}
    for node in nodes[1:]:
        move = None
        extra = []
        comment = None
        for ident, values, line, col in node:
            if ident in ("B", "W"):
                if move is not None:
                    raise ParseError("two moves in one node", line, col)
                color = Color.BLACK if ident == "B" else Color.WHITE
                p = _point(values[0], size, line, col)
                move = Action(color, p) if p is not None else pass_action(color)
            elif ident == "C":
                comment = values[0]
            else:
                extra.append((ident, values))
        if move is None:
            if extra or comment:
                # setup-only or comment-only node after the root: keep it attached to the next move
                idx = len(actions)
                move_props.setdefault(idx, []).extend(extra)
            continue
        idx = len(actions)
        actions.append(move)
        if comment is not None:
            move_comments[idx] = comment
        if extra:
            move_props.setdefault(idx, []).extend(extra)
    if move_comments:
        meta["move_comments"] = move_comments
    if move_props:
        meta["move_props"] = move_props
    rec = GameRecord(size, rules, tuple(actions), game_id,
                     tuple(setup) if has_setup else None, first, meta)
    rec.validate()
    return rec


def _prop(ident: str, values) -> str:
    if isinstance(values, str):
        values = [values]
    return ident + "".join(f"[{_escape(v)}]" for v in values)


def _fmt_komi(k: float) -> str:
    return str(int(k)) if float(k).is_integer() else repr(float(k))


def emit_sgf(record: GameRecord, comments: dict[int, str] | None = None, root_comment: str | None = None) -> str:
    """Serialize the main line. ``comments`` maps move index to a C[] value."""
    meta = record.metadata or {}
    out = ["(;", "FF[4]GM[1]", _prop("SZ", str(record.size))]
    rules: Rules = record.rules
    if rules.is_nogo:
        out.append(_prop("RU", "NoGo"))
    else:
        out.append(_prop("KM", _fmt_komi(rules.komi)))
        out.append(_prop("RU", meta.get("ruleset") or "Tromp-Taylor"))
    for key, name in (("PB", "black"), ("PW", "white")):
        if name in meta:
            out.append(_prop(key, str(meta[name])))
    for ident, values in meta.get("root_props", []):
        if ident not in ("PB", "PW"):
            out.append(_prop(ident, values))
    if record.setup is not None:
        for key, color in (("AB", Color.BLACK), ("AW", Color.WHITE)):
            pts = [point_to_sgf(divmod(p, record.size)) for p, v in enumerate(record.setup) if v == color]
            if pts:
                out.append(_prop(key, pts))
    if record.first_turn != Color.BLACK:
        out.append(_prop("PL", "W"))
    rc = root_comment if root_comment is not None else meta.get("comment")
    if rc:
        out.append(_prop("C", rc))
    move_comments = dict(meta.get("move_comments", {}))
    move_comments.update(comments or {})
    move_props = meta.get("move_props", {})
    for i, a in enumerate(record.actions):
        out.append(";" + _prop(a.color.letter, point_to_sgf(a.point)))
        for ident, values in move_props.get(i, []):
            out.append(_prop(ident, values))
        if i in move_comments:
            out.append(_prop("C", move_comments[i]))
    out.append(")\n")
    return "".join(out)
