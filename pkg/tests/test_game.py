import dataclasses
import random

import pytest
from hypothesis import given, strategies as st

from advstate.game import (
    Action,
    Color,
    GameState,
    IllegalAction,
    Rules,
    board_hash,
    exact_territory,
    go_rules,
    nogo_rules,
    parse_action,
    parse_board,
    pass_action,
    replay,
    skip_play,
)
from reference_rules import RefGame

GAMES = 1000


def ref_for(rules: Rules, size: int) -> RefGame:
    return RefGame(size, rules.game, rules.komi, rules.superko)


def points_of(s: GameState) -> list:
    return sorted(a.point for a in s.legal_actions() if a.point is not None)


def play_random(seed: int, size: int, rules: Rules, pass_prob=0.05, check=True):
    """Random game checked against the reference model at every step."""
    rng = random.Random(seed)
    s = GameState.new(size, rules)
    ref = ref_for(rules, size)
    states = [s]
    while True:
        if check:
            assert s.is_terminal == ref.over()
            if not s.is_terminal:
                assert points_of(s) == sorted(ref.legal_points())
        if s.is_terminal:
            break
        acts = s.legal_actions()
        places = [a for a in acts if a.point is not None]
        if rules.is_go and (not places or rng.random() < pass_prob):
            a = pass_action(s.turn)
        else:
            a = rng.choice(places)
        s = s.play(a)
        ref.play(a.point)
        if check:
            expect = {(r, c): ("B" if v == "B" else "W") for (r, c), v in ref.board.items()}
            got = {divmod(p, size): ("B" if v == Color.BLACK else "W") for p, v in enumerate(s.board) if v}
            assert got == expect
        states.append(s)
    return states, ref


def test_superko_matches_reference():
    excluded = 0
    for seed in range(GAMES):
        size = 3 if seed % 2 else 4
        states, _ = play_random(seed, size, go_rules(size), pass_prob=0.02)
        for s in states:
            if s.is_terminal:
                continue
            by_capture_rules = set(s.placement_points(int(s.turn)))
            excluded += len(by_capture_rules) - len(points_of(s))
    # the corpus must actually hit repeated positions
    assert excluded > 100


def test_capture_matches_reference():
    captures = 0
    for seed in range(GAMES):
        size = 4 + seed % 2
        rules = go_rules(size, superko=False)
        states, _ = play_random(seed, size, rules, pass_prob=0.02)
        for a, b in zip(states, states[1:]):
            captures += sum(1 for x, y in zip(a.board, b.board) if x and not y)
    assert captures > GAMES


def test_nogo_legality_matches_reference():
    for seed in range(GAMES):
        size = 4 + seed % 3
        states, ref = play_random(seed, size, nogo_rules())
        last = states[-1]
        assert last.is_terminal and not last.legal_actions()
        assert last.winner() == last.turn.opponent
        for a, b in zip(states, states[1:]):
            # stones never leave a NoGo board
            assert all(x == y for x, y in zip(a.board, b.board) if x)


def test_zero_sum_outcomes():
    for seed in range(GAMES):
        size = 4 + seed % 2
        rules = go_rules(size) if seed % 2 else nogo_rules()
        states, ref = play_random(seed, size, rules, check=False)
        last = states[-1]
        out = last.outcome()
        assert out.terminal
        assert out.reward_for_turn_player in (-1, 0, 1)
        expected = ref.winner()
        got = last.winner()
        assert (got.letter if got is not None else None) == expected
        if last.rules.is_go:
            flipped = dataclasses.replace(last, turn=last.turn.opponent)
            assert flipped.outcome().reward_for_turn_player == -out.reward_for_turn_player
            b, w = last.area()
            assert (b, w) == ref.area()
            assert b + w <= last.size ** 2


def test_history_round_trip():
    for seed in range(GAMES):
        size = 3 + seed % 3
        rules = go_rules(size) if seed % 3 else nogo_rules()
        states, _ = play_random(seed, size, rules, check=False)
        last = states[-1]
        again = GameState.from_history(size, rules, last.history)
        assert again == last
        assert again.seen == last.seen
        assert replay(size, rules, last.history) == states
        assert tuple(parse_action(str(a)) for a in last.history) == last.history
        assert last.position_hash == board_hash(last.board, last.turn)


@given(st.sampled_from([Color.BLACK, Color.WHITE]),
       st.one_of(st.none(), st.tuples(st.integers(0, 18), st.integers(0, 18))))
def test_action_text_round_trip(color, point):
    a = Action(color, point)
    assert parse_action(str(a)) == a


@pytest.mark.parametrize("text", ["", "X:1,1", "B:1", "B:a,b", "B1,1"])
def test_parse_action_rejects(text):
    with pytest.raises(ValueError):
        parse_action(text)


def test_single_capture():
    s = parse_board("""
        . X .
        X O X
        . . .
    """)
    t = s.play(Action(Color.BLACK, (2, 1)))
    assert t.at((1, 1)) == 0


def test_suicide_is_illegal():
    s = parse_board("""
        . X .
        X . X
        . X .
    """, turn=Color.WHITE)
    with pytest.raises(IllegalAction):
        s.play(Action(Color.WHITE, (1, 1)))
    assert not s.is_legal(Action(Color.WHITE, (0, 0)))


def test_simple_ko_recapture_is_forbidden():
    s = parse_board("""
        . X O .
        X O . O
        . X O .
        . . . .
    """)
    s = s.play(Action(Color.BLACK, (1, 2)))
    assert s.at((1, 1)) == 0
    with pytest.raises(IllegalAction, match="superko"):
        s.play(Action(Color.WHITE, (1, 1)))
    # after an exchange elsewhere the ko can be retaken
    s = s.play(Action(Color.WHITE, (3, 3))).play(Action(Color.BLACK, (3, 0)))
    assert s.is_legal(Action(Color.WHITE, (1, 1)))


def test_nogo_forbids_capture_and_suicide():
    s = parse_board("""
        . X .
        X O X
        . . .
    """, rules=nogo_rules())
    assert not s.is_legal(Action(Color.BLACK, (2, 1)))
    assert not s.is_legal(Action(Color.WHITE, (0, 0)))
    assert s.is_legal(Action(Color.BLACK, (0, 0)))
    assert pass_action(Color.BLACK) not in s.legal_actions()


def test_tromp_taylor_score():
    s = parse_board("""
        . X O .
        . X O .
        . X O .
        . X O .
    """, rules=go_rules(4, komi=0.5))
    assert s.area() == (8, 8)
    assert s.score() == -0.5
    assert exact_territory(s)[:4] == (1.0, 1.0, -1.0, -1.0)


def test_two_passes_end_go():
    s = GameState.new(3, go_rules(3))
    s = s.play(pass_action(Color.BLACK))
    assert not s.is_terminal
    s = s.play(pass_action(Color.WHITE))
    assert s.is_terminal and s.legal_actions() == []
    # komi 7 on an empty board
    assert s.winner() == Color.WHITE


def test_move_cap():
    rules = Rules("go", 0.5, True, max_moves=2)
    s = GameState.new(3, rules).play(Action(Color.BLACK, (0, 0))).play(Action(Color.WHITE, (2, 2)))
    assert s.is_terminal


def test_skip_play_keeps_turn():
    s = GameState.new(5, go_rules(5))
    own = skip_play(s, Action(Color.BLACK, (2, 2)))
    other = skip_play(s, Action(Color.WHITE, (2, 2)))
    assert own.turn == other.turn == Color.BLACK
    assert own.board == other.board[:12] + (int(Color.BLACK),) + other.board[13:]
    assert own.history[-1].is_pass and other.history[0].is_pass


def test_setup_hash_matches_played_position():
    played = GameState.new(3, go_rules(3)).play(Action(Color.BLACK, (1, 1))).play(Action(Color.WHITE, (0, 0)))
    setup = GameState.from_setup(3, go_rules(3), played.board, played.turn)
    assert setup.position_hash == played.position_hash
    assert setup.history == ()


def test_wrong_color_and_off_board():
    s = GameState.new(3, go_rules(3))
    with pytest.raises(IllegalAction):
        s.play(Action(Color.WHITE, (0, 0)))
    with pytest.raises(IllegalAction):
        s.play(Action(Color.BLACK, (3, 0)))
