"""Seeded self-play between two configured agents."""

from __future__ import annotations

import random

from advstate.agents.agent import AgentSpec
from advstate.agents.base import argmax_action
from advstate.game import Color, GameState, Rules
from advstate.record import GameRecord


def sample_action(policy: dict, rng: random.Random):
    # sorted so the draw does not depend on dict insertion order
    items = sorted(policy.items(), key=lambda kv: kv[0].sort_key())
    total = sum(p for _, p in items)
    x = rng.random() * total
    acc = 0.0
    for a, p in items:
        acc += p
        if x < acc:
            return a
    return items[-1][0]


def self_play(size: int, rules: Rules, black: AgentSpec, white: AgentSpec, seed: int,
              opening_moves: int | None = None, game_id: str = "") -> GameRecord:
    """Play one game; the first ``opening_moves`` moves are sampled from the
    search policy, later ones take its argmax."""
    if opening_moves is None:
        opening_moves = (size * size) // 4
    rng = random.Random(seed)
    agents = {Color.BLACK: black.build("black"), Color.WHITE: white.build("white")}
    s = GameState.new(size, rules)
    while not s.is_terminal:
        policy = agents[s.turn].policy(s)
        if len(s.history) < opening_moves:
            a = sample_action(policy, rng)
        else:
            a = argmax_action(policy)
        s = s.play(a)
    meta = {
        "black": black.label(),
        "white": white.label(),
        "seed": seed,
        "source": "selfplay",
    }
    return GameRecord(size, rules, s.history, game_id, metadata=meta)


def self_play_corpus(size: int, rules: Rules, black: AgentSpec, white: AgentSpec, count: int, seed: int,
                     prefix: str = "game", opening_moves: int | None = None) -> list[GameRecord]:
    return [
        self_play(size, rules, black, white, seed + i, opening_moves, f"{prefix}-{i:03d}")
        for i in range(count)
    ]
