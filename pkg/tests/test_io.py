import json

import pytest

from advstate.agents.agent import AgentSpec
from advstate.game import Action, Color, go_rules, nogo_rules, parse_action
from advstate.record import GameRecord, IllegalMove
from advstate.render import RenderSpec, render_board
from advstate.reports import dumps, render_report, report_sgf, verify_report
from advstate.selfplay import self_play
from advstate.sgf import ParseError, emit_sgf, parse_sgf
from helpers import DATA


def test_minimal_record():
    rec = parse_sgf("(;GM[1]SZ[5];B[cc];W[dd])")
    assert rec.size == 5
    assert rec.actions == (Action(Color.BLACK, (2, 2)), Action(Color.WHITE, (3, 3)))


def test_round_trip_on_generated_games():
    for seed in range(100):
        size = 4 + seed % 3
        rules = go_rules(size) if seed % 2 else nogo_rules()
        rec = self_play(size, rules, AgentSpec("mcts", 1), AgentSpec("mcts", 1), seed=seed, game_id=f"g{seed}")
        text = emit_sgf(rec)
        back = parse_sgf(text, rec.game_id)
        assert back.actions == rec.actions
        assert back.rules == rec.rules
        assert emit_sgf(back) == text


def test_illegal_suicide_reports_index():
    with pytest.raises(IllegalMove) as e:
        parse_sgf("(;GM[1]SZ[3];B[ba];W[cc];B[ab];W[aa])")
    assert e.value.index == 3


def test_empty_game_is_header_only():
    assert emit_sgf(GameRecord(5, go_rules(5), ())) == "(;FF[4]GM[1]SZ[5]KM[7]RU[Tromp-Taylor])\n"
    assert emit_sgf(GameRecord(7, nogo_rules(), ())) == "(;FF[4]GM[1]SZ[7]RU[NoGo])\n"


def test_unknown_properties_survive():
    text = "(;GM[1]SZ[5]PB[alice]XX[foo\\]bar];B[cc]YY[1];W[dd]C[hi])"
    out = emit_sgf(parse_sgf(text))
    for piece in ("PB[alice]", "XX[foo\\]bar]", ";B[cc]YY[1]", ";W[dd]C[hi]"):
        assert piece in out
    # a missing RU is written as the default ruleset, after which output is stable
    assert emit_sgf(parse_sgf(out)) == out


def test_pass_forms_and_setup():
    rec = parse_sgf("(;GM[1]SZ[5]AB[aa][bb]AW[cc]PL[W];W[];B[tt])")
    assert rec.setup[0] == rec.setup[6] == int(Color.BLACK)
    assert rec.first_turn == Color.WHITE
    assert all(a.is_pass for a in rec.actions)
    assert parse_sgf(emit_sgf(rec)).setup == rec.setup


@pytest.mark.parametrize("text,line,col", [
    ("(;GM[1]SZ[5];B[zz])", 1, 14),
    ("(;GM[1]SZ[5]\n;B[cc]W[dd])", 2, 7),
    (";B[cc]", 1, 1),
    ("(;GM[2])", 1, 3),
])
def test_parse_errors_carry_position(text, line, col):
    with pytest.raises(ParseError) as e:
        parse_sgf(text)
    assert (e.value.line, e.value.col) == (line, col)


def test_empty_board_has_five_rows():
    out = render_board(RenderSpec(5, (0,) * 25))
    rows = out.splitlines()
    assert len(rows) == 7
    assert rows[1] == "5  . . . . .  5"
    assert rows[0] == rows[-1] == "   A B C D E"


def test_marker_precedence_over_stone():
    board = (int(Color.BLACK),) + (0,) * 8
    spec = RenderSpec(3, board, (((0, 0), "*"), ((0, 0), "1"), ((0, 0), "A")))
    assert render_board(spec).splitlines()[1] == "3  1 . .  3"


def test_column_labels_skip_i():
    header = render_board(RenderSpec(9, (0,) * 81)).splitlines()[0]
    assert header.split() == list("ABCDEFGHJ")


@pytest.mark.parametrize("marker", [((5, 0), "1"), ((0, 0), "Z")])
def test_bad_markers(marker):
    with pytest.raises(ValueError):
        RenderSpec(5, (0,) * 25, (marker,))


def load(name):
    return json.loads((DATA / f"{name}.json").read_text())


@pytest.mark.parametrize("name", ["report_policy", "report_value"])
def test_golden_render(name):
    assert render_report(load(name)) == (DATA / f"{name}.txt").read_text()


@pytest.mark.parametrize("name", ["report_policy", "report_value"])
def test_report_serialization_is_stable(name):
    doc = load(name)
    assert dumps(doc) == (DATA / f"{name}.json").read_text()


@pytest.mark.parametrize("name", ["report_policy", "report_value"])
def test_report_sgf_ends_with_perturbation(name):
    doc = load(name)
    rec = parse_sgf(report_sgf(doc))
    assert [str(a) for a in rec.actions[-2:]] == [doc["b0"], doc["b1"]]
    assert len(rec.actions) == doc["base_index"] + 2


@pytest.mark.parametrize("name", ["report_policy", "report_value"])
def test_fixture_reports_verify(name):
    v = verify_report(load(name))
    assert v.passed, v.lines()
    assert "recomputed_bit_exact" in [c for c, _, _ in v.clauses]


def test_tampered_point_fails_verification():
    doc = load("report_value")
    s = parse_action(doc["b1"])
    # another legal empty point for the same colour
    doc["b1"] = str(Action(s.color, (4, 3)))
    v = verify_report(doc)
    assert not v.passed
    assert "recomputed_bit_exact" in v.failed


def test_occupied_point_fails_verification():
    doc = load("report_value")
    doc["b1"] = "B:0,0"
    v = verify_report(doc)
    assert v.failed == ["perturbation_legal"]


def test_tampered_measurement_fails_verification():
    doc = load("report_policy")
    doc["measured"]["V_s"] += 1e-12
    v = verify_report(doc)
    assert v.failed == ["recomputed_bit_exact"]


def test_truncated_trajectory_fails_verification():
    doc = load("report_value")
    doc["trajectory"] = doc["trajectory"][:-1]
    assert "base_index" in verify_report(doc).failed
