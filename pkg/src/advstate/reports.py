"""Attack report documents: serialization, independent re-verification, rendering.

A report is a JSON object with these stable fields:

``format``, ``version``
    ``"advstate-attack-report"`` and the schema version.
``game_id``, ``kind`` (``value``/``policy``), ``step_mode`` (``1step``/``2step``), ``base_index``
    Which game state was attacked and how.
``rules``
    ``{"game", "size", "komi", "superko", "max_moves"}``.
``setup``, ``first_turn``
    Pre-placed stones (list of 0/1/2 per point, or null) and the side to move first.
``trajectory``
    Actions leading to the attacked state, as ``"B:r,c"`` / ``"W:pass"`` strings.
``b0``, ``b1``
    The two appended actions.
``measured``
    Every quantity used by the success test (win-rates and, for policy
    attacks, the target's moves and examiner action values).
``settings``, ``target``, ``examiner``, ``stats``
    Thresholds and switches, both agent recipes, and call accounting.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from advstate.agents.agent import Agent, AgentSpec, hinted_value
from advstate.attack import AttackKind, AttackReport, AttackSettings, AttackStats, policy_clauses, value_clauses
from advstate.game import Color, IllegalAction, Rules, parse_action
from advstate.record import GameRecord
from advstate.render import RenderSpec, point_label, render_board
from advstate.sgf import emit_sgf

FORMAT = "advstate-attack-report"
VERSION = 1


class VerificationFailed(AssertionError):
    def __init__(self, failed: list[str]):
        super().__init__("violated: " + ", ".join(failed))
        self.failed = failed


def rules_to_dict(rules: Rules, size: int) -> dict:
    return {"game": rules.game, "size": size, "komi": rules.komi, "superko": rules.superko,
            "max_moves": rules.max_moves}


def rules_from_dict(d: dict) -> tuple[Rules, int]:
    return Rules(d["game"], d["komi"], d["superko"], d["max_moves"]), d["size"]


def report_to_dict(report: AttackReport, game: GameRecord, settings: AttackSettings, target: AgentSpec,
                   examiner: AgentSpec) -> dict:
    s = game.states[report.base_index]
    c = report.candidate
    return {
        "format": FORMAT,
        "version": VERSION,
        "game_id": report.game_id,
        "kind": report.kind.value,
        "step_mode": c.step_mode.value,
        "base_index": report.base_index,
        "rules": rules_to_dict(game.rules, game.size),
        "setup": list(game.setup) if game.setup is not None else None,
        "first_turn": game.first_turn.letter,
        "trajectory": [str(a) for a in s.history],
        "b0": str(c.b0),
        "b1": str(c.b1),
        "measured": dict(report.measured),
        "settings": settings.to_dict(),
        "target": target.to_dict(),
        "examiner": examiner.to_dict(),
        "stats": report.stats.to_dict(),
    }


def dumps(doc: dict) -> str:
    # repr-exact floats, fixed key order: equal documents give equal bytes
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_report(path) -> dict:
    with open(path) as f:
        doc = json.load(f)
    if doc.get("format") != FORMAT:
        raise ValueError(f"{path}: not an attack report")
    return doc


def base_record(doc: dict) -> GameRecord:
    rules, size = rules_from_dict(doc["rules"])
    first = Color.WHITE if doc.get("first_turn") == "W" else Color.BLACK
    setup = tuple(doc["setup"]) if doc.get("setup") is not None else None
    actions = tuple(parse_action(a) for a in doc["trajectory"])
    return GameRecord(size, rules, actions, doc["game_id"], setup, first)


def perturbed_record(doc: dict) -> GameRecord:
    base = base_record(doc)
    actions = base.actions + (parse_action(doc["b0"]), parse_action(doc["b1"]))
    return GameRecord(base.size, base.rules, actions, base.game_id, base.setup, base.first_turn,
                      {"source": "attack-report"})


def _measure_value(s, sp, target: Agent, examiner: Agent, use_hint: bool) -> dict:
    hint = examiner.best_action(s) if use_hint else None
    return {
        "v_s": target.value(s),
        "V_s": examiner.value(s),
        "v_s_prime": target.value(sp),
        "V_s_prime": hinted_value(sp, hint, examiner),
        "V_s_prime_plain": examiner.value(sp),
        "hint": None if hint is None else str(hint),
    }


def _measure_policy(s, sp, target: Agent, examiner: Agent, use_hint: bool) -> dict:
    hint = examiner.best_action(s) if use_hint else None
    a_s = target.best_action(s)
    a_sp = target.best_action(sp)
    return {
        "V_s": examiner.value(s),
        "V_s_prime": hinted_value(sp, hint, examiner),
        "V_s_prime_plain": examiner.value(sp),
        "a_s": str(a_s),
        "a_s_prime": str(a_sp),
        "Q_s_a_s": examiner.q(s, a_s),
        "Q_s_prime_a_s_prime": examiner.q(sp, a_sp),
        "Q_s_prime_a_s": examiner.q(sp, a_s),
        "Q_s_a_s_prime": examiner.q(s, a_sp),
        "hint": None if hint is None else str(hint),
    }


@dataclass
class Verification:
    clauses: list[tuple[str, bool, str]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.clauses)

    @property
    def failed(self) -> list[str]:
        return [name for name, ok, _ in self.clauses if not ok]

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.clauses.append((name, bool(ok), detail))

    def lines(self) -> list[str]:
        return [f"{'PASS' if ok else 'FAIL'} {name}" + (f"  {detail}" if detail else "")
                for name, ok, detail in self.clauses]


def verify_report(doc: dict, examiner_override: AgentSpec | None = None) -> Verification:
    """Rebuild s and s' from the document and re-check every clause with fresh agents.

    With the recorded examiner, recomputed quantities must match the stored
    ones bit for bit. With ``examiner_override`` (e.g. the exact oracle) only
    the success criteria are re-asserted under the new examiner.
    """
    out = Verification()
    settings = AttackSettings.from_dict(doc["settings"])
    th = settings.thresholds
    try:
        rec = base_record(doc)
        s = rec.states[-1]
    except (IllegalAction, ValueError) as e:
        out.add("trajectory_legal", False, str(e))
        return out
    out.add("trajectory_legal", True)
    out.add("base_index", len(rec.actions) == doc["base_index"], f"trajectory length {len(rec.actions)}")
    try:
        b0 = parse_action(doc["b0"])
        b1 = parse_action(doc["b1"])
        sp = s.play(b0).play(b1)
    except (IllegalAction, ValueError) as e:
        out.add("perturbation_legal", False, str(e))
        return out
    out.add("perturbation_legal", True)
    passes = b0.is_pass + b1.is_pass
    mode_ok = (doc["step_mode"] == "1step" and passes == 1) or (doc["step_mode"] == "2step" and passes == 0)
    out.add("perturbation_shape", sp.turn == s.turn and not sp.is_terminal and mode_ok,
            f"turn kept={sp.turn == s.turn} terminal={sp.is_terminal} passes={passes}")

    target = AgentSpec.from_dict(doc["target"]).build("target")
    examiner_spec = examiner_override or AgentSpec.from_dict(doc["examiner"])
    examiner = examiner_spec.build("examiner")
    kind = AttackKind(doc["kind"])
    if kind == AttackKind.VALUE:
        m = _measure_value(s, sp, target, examiner, settings.use_hint)
        clauses = value_clauses(m["v_s"], m["V_s"], m["v_s_prime"], m["V_s_prime"], th)
    else:
        m = _measure_policy(s, sp, target, examiner, settings.use_hint)
        if m["Q_s_prime_a_s"] is None:
            out.add("anchor_legal", False, f"{m['a_s']} is illegal at s'")
        clauses = policy_clauses(m["V_s"], m["V_s_prime"], m["Q_s_a_s"], m["Q_s_prime_a_s_prime"],
                                 m["Q_s_prime_a_s"], m["Q_s_a_s_prime"], th)
    detail = " ".join(f"{k}={v!r}" for k, v in m.items())
    for name, ok in clauses.items():
        out.add(name, ok, detail if not ok else "")
    if examiner_override is None:
        stored = doc["measured"]
        diffs = [k for k in m if stored.get(k) != m[k]]
        out.add("recomputed_bit_exact", not diffs,
                ", ".join(f"{k} stored={stored.get(k)!r} now={m[k]!r}" for k in diffs))
    return out


def report_render_spec(doc: dict) -> RenderSpec:
    rec = perturbed_record(doc)
    sp = rec.states[-1]
    size = rec.size
    markers = []
    legend = []
    b0 = parse_action(doc["b0"])
    b1 = parse_action(doc["b1"])
    for glyph, a in (("1", b0), ("2", b1)):
        if a.point is not None:
            markers.append((a.point, glyph))
        legend.append(f"{glyph} = {a.color.name.lower()} {point_label(a.point, size)}")
    m = doc["measured"]
    if doc["kind"] == "policy":
        for glyph, key in (("A", "a_s"), ("B", "a_s_prime")):
            a = parse_action(m[key])
            if a.point is not None:
                markers.append((a.point, glyph))
            legend.append(f"{glyph} = target move {'before' if glyph == 'A' else 'after'} "
                          f"the perturbation, {point_label(a.point, size)}")
    if m.get("hint"):
        a = parse_action(m["hint"])
        if a.point is not None:
            markers.append((a.point, "*"))
        legend.append(f"* = examiner best move {point_label(a.point, size)}")
    for k in sorted(m):
        if k in ("a_s", "a_s_prime", "hint"):
            continue
        legend.append(f"{k} = {m[k]:.4f}" if isinstance(m[k], float) else f"{k} = {m[k]}")
    title = (f"{doc['game_id']} {doc['kind']} {doc['step_mode']} at move {doc['base_index']}, "
             f"{sp.turn.name.lower()} to play")
    return RenderSpec(size, sp.board, tuple(markers), title, tuple(legend))


def render_report(doc: dict) -> str:
    return render_board(report_render_spec(doc))


def report_sgf(doc: dict) -> str:
    rec = perturbed_record(doc)
    m = doc["measured"]
    values = " ".join(f"{k}={m[k]}" for k in sorted(m))
    n = len(rec.actions)
    comments = {
        n - 2: f"perturbation 1 ({doc['kind']} {doc['step_mode']})",
        n - 1: f"perturbation 2; {values}",
    }
    return emit_sgf(rec, comments)


def stats_from_doc(doc: dict) -> AttackStats:
    return AttackStats.from_dict(doc["stats"])

