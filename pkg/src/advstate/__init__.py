"""Adversarial perturbation search for Go and NoGo agents."""

from advstate.game import Action, Color, GameState, IllegalAction, Rules, go_rules, nogo_rules
from advstate.record import GameRecord, IllegalMove

__all__ = ["Action", "Color", "GameRecord", "GameState", "IllegalAction", "IllegalMove", "Rules", "go_rules",
           "nogo_rules"]
__version__ = "0.1.0"
