"""Value/policy containers shared by every agent."""

from __future__ import annotations

from dataclasses import dataclass, field

from advstate.game import Action


def argmax_action(dist: dict[Action, float]) -> Action | None:
    """Highest-scoring action; ties go to the lowest (row, col), pass last."""
    best = None
    best_key = None
    for a, p in dist.items():
        k = (-p, a.sort_key())
        if best_key is None or k < best_key:
            best, best_key = a, k
    return best


@dataclass(frozen=True)
class PolicyValue:
    """Raw provider output: turn-player win-rate and a prior over legal actions."""

    value: float
    policy: dict[Action, float]

    def best_action(self) -> Action | None:
        return argmax_action(self.policy)


@dataclass(frozen=True)
class Evaluation:
    """Search output for one state.

    ``value`` and every entry of ``action_values`` are win-rates for the turn
    player of the evaluated state.
    """

    value: float
    policy: dict[Action, float]
    action_values: dict[Action, float] = field(default_factory=dict)
    territory: tuple[float, ...] | None = None
    visits: dict[Action, int] = field(default_factory=dict)

    def best_action(self) -> Action | None:
        return argmax_action(self.policy)


@dataclass(frozen=True)
class AgentConfig:
    simulations: int = 800
    puct_constant: float = 1.25
    seed: int = 0

    def __post_init__(self):
        if self.simulations < 1:
            raise ValueError("simulations must be >= 1")
        if self.puct_constant <= 0:
            raise ValueError("puct_constant must be positive")
