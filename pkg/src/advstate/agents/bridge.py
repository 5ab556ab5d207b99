"""Client for external engines speaking a small GTP-like line protocol.

Requests, one per line::

    boardsize <N>
    rules <go|nogo>
    komi <float>
    clear_board
    play <B|W> <vertex|pass>
    analyze <visits>
    quit

Every response starts with ``=`` (success) or ``?`` (error) and ends with an
empty line. Vertices are a column letter (``I`` skipped) plus the row number
counted from the bottom, e.g. ``A1`` is the bottom-left corner. The body of a
successful ``analyze`` response holds lines of space-separated key/value
pairs::

    info move <vertex> visits <int> winrate <float> prior <float>
    root visits <int> winrate <float>
    ownership <N*N floats, row-major from the top-left, +1 = Black>

``winrate`` is for the side to move. Unknown keys and unknown line types are
ignored; anything else malformed raises :class:`ProtocolError`.
"""

from __future__ import annotations

import queue
import shlex
import subprocess
import threading

from advstate.agents.base import Evaluation
from advstate.game import Action, GameState
from advstate.render import COLUMN_LETTERS


class BridgeError(RuntimeError):
    pass


class ProtocolError(BridgeError):
    pass


class Timeout(BridgeError):
    pass


class EngineCrashed(BridgeError):
    pass


def vertex(point: tuple[int, int] | None, size: int) -> str:
    if point is None:
        return "pass"
    r, c = point
    return f"{COLUMN_LETTERS[c]}{size - r}"


def parse_vertex(text: str, size: int) -> tuple[int, int] | None:
    t = text.strip().upper()
    if t == "PASS":
        return None
    if len(t) < 2 or t[0] not in COLUMN_LETTERS[:size]:
        raise ProtocolError(f"bad vertex {text!r}")
    try:
        row = int(t[1:])
    except ValueError:
        raise ProtocolError(f"bad vertex {text!r}") from None
    if not 1 <= row <= size:
        raise ProtocolError(f"vertex {text!r} is off the board")
    return (size - row, COLUMN_LETTERS.index(t[0]))


def format_ownership(values) -> str:
    return " ".join(repr(float(v)) for v in values)


def parse_ownership(fields: list[str], n: int) -> tuple[float, ...]:
    if len(fields) != n:
        raise ProtocolError(f"ownership has {len(fields)} values, expected {n}")
    try:
        out = tuple(float(x) for x in fields)
    except ValueError:
        raise ProtocolError("non-numeric ownership value") from None
    if any(not -1.0 <= x <= 1.0 for x in out):
        raise ProtocolError("ownership value outside [-1, 1]")
    return out


_FIELDS = ("move", "visits", "winrate", "prior")


def _pairs(fields: list[str]) -> dict[str, str]:
    # known keys take the next token; anything else (including multi-token
    # fields such as principal variations) is skipped
    out = {}
    i = 0
    while i < len(fields):
        if fields[i] in _FIELDS:
            if i + 1 >= len(fields):
                raise ProtocolError(f"{fields[i]} without a value")
            out[fields[i]] = fields[i + 1]
            i += 2
        else:
            i += 1
    return out


def _num(d: dict, key: str, conv, line: str):
    if key not in d:
        raise ProtocolError(f"missing {key} in {line!r}")
    try:
        return conv(d[key])
    except ValueError:
        raise ProtocolError(f"bad {key} in {line!r}") from None


def parse_analysis(body: list[str], s: GameState) -> Evaluation:
    """Map an ``analyze`` response body onto an :class:`Evaluation` for ``s``."""
    size = s.size
    value = None
    moves: list[tuple[Action, int, float, float]] = []
    territory = None
    for line in body:
        fields = line.split()
        if not fields:
            continue
        head, rest = fields[0], fields[1:]
        if head == "info":
            d = _pairs(rest)
            if "move" not in d:
                raise ProtocolError(f"info line without move: {line!r}")
            point = parse_vertex(d["move"], size)
            a = Action(s.turn, point)
            moves.append((a, _num(d, "visits", int, line), _num(d, "winrate", float, line),
                          float(d.get("prior", "0"))))
        elif head == "root":
            d = _pairs(rest)
            value = _num(d, "winrate", float, line)
        elif head == "ownership":
            territory = parse_ownership(rest, size * size)
        # other line types are ignored
    if value is None:
        raise ProtocolError("analysis without a root line")
    if not 0.0 <= value <= 1.0:
        raise ProtocolError(f"root winrate {value} outside [0, 1]")
    total = sum(v for _, v, _, _ in moves)
    if total > 0:
        policy = {a: v / total for a, v, _, _ in moves}
    else:
        z = sum(p for _, _, _, p in moves)
        policy = {a: (p / z if z > 0 else 1.0 / len(moves)) for a, _, _, p in moves}
    q = {a: w for a, v, w, _ in moves if v > 0}
    visits = {a: v for a, v, _, _ in moves if v > 0}
    return Evaluation(value, policy, q, territory, visits)


class EngineBridge:
    """Runs an engine subprocess and asks it to analyse positions."""

    def __init__(self, cmd: str, visits: int = 800, timeout: float = 30.0):
        self.cmd = cmd
        self.visits = visits
        self.timeout = timeout
        self._proc: subprocess.Popen | None = None
        self._lines: queue.Queue = queue.Queue()

    def __call__(self, s: GameState) -> Evaluation:
        return self.evaluate(s)

    def _start(self) -> None:
        try:
            self._proc = subprocess.Popen(shlex.split(self.cmd), stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                                          stderr=subprocess.DEVNULL, text=True, bufsize=1)
        except OSError as e:
            raise EngineCrashed(f"cannot start engine: {e}") from None
        self._lines = queue.Queue()
        threading.Thread(target=self._pump, args=(self._proc.stdout, self._lines), daemon=True).start()

    @staticmethod
    def _pump(stream, q: queue.Queue) -> None:
        for line in stream:
            q.put(line.rstrip("\n"))
        q.put(None)

    def _read_line(self) -> str:
        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            self.close()
            raise Timeout(f"engine gave no answer within {self.timeout}s") from None
        if line is None:
            self._proc = None
            raise EngineCrashed("engine closed its output")
        return line

    def send(self, command: str) -> list[str]:
        """Send one command; returns the response lines after the status marker."""
        if self._proc is None or self._proc.poll() is not None:
            self._start()
        try:
            self._proc.stdin.write(command + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError):
            self._proc = None
            raise EngineCrashed("engine input closed") from None
        first = self._read_line()
        while first == "":
            first = self._read_line()
        if first.startswith("?"):
            self._drain()
            raise ProtocolError(f"engine rejected {command!r}: {first[1:].strip()}")
        if not first.startswith("="):
            raise ProtocolError(f"response to {command!r} does not start with '=': {first!r}")
        body = [first[1:].strip()] if first[1:].strip() else []
        body += self._drain()
        return body

    def _drain(self) -> list[str]:
        out = []
        while True:
            line = self._read_line()
            if line == "":
                return out
            out.append(line)

    def evaluate(self, s: GameState) -> Evaluation:
        try:
            replayed = GameState.from_history(s.size, s.rules, s.history).board
        except ValueError:
            replayed = None
        if replayed != s.board:
            raise BridgeError("positions with setup stones cannot be sent as move lists")
        self.send(f"boardsize {s.size}")
        self.send(f"rules {s.rules.game}")
        self.send(f"komi {s.rules.komi!r}")
        self.send("clear_board")
        for a in s.history:
            self.send(f"play {a.color.letter} {vertex(a.point, s.size)}")
        return parse_analysis(self.send(f"analyze {self.visits}"), s)

    def close(self) -> None:
        proc = self._proc
        self._proc = None
        if proc is None:
            return
        try:
            if proc.poll() is None:
                proc.stdin.write("quit\n")
                proc.stdin.flush()
        except (BrokenPipeError, OSError, ValueError):
            pass
        try:
            proc.wait(timeout=1.0)
        except subprocess.TimeoutExpired:
            proc.kill()
            proc.wait()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def __del__(self):
        try:
            self.close()
        except Exception:
            pass


def engine_bridge_evaluate(s: GameState, endpoint: EngineBridge) -> Evaluation:
    return endpoint.evaluate(s)
