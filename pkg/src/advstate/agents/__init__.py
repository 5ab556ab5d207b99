from advstate.agents.agent import Agent, AgentSpec, hinted_value, robust_policy
from advstate.agents.base import AgentConfig, Evaluation, PolicyValue
from advstate.agents.heuristic import HeuristicProvider
from advstate.agents.mcts import PVMCTS, pv_mcts_evaluate
from advstate.agents.oracle import ExactOracle, ResourceExceeded

__all__ = [
    "Agent", "AgentConfig", "AgentSpec", "Evaluation", "ExactOracle", "HeuristicProvider", "PVMCTS",
    "PolicyValue", "ResourceExceeded", "hinted_value", "pv_mcts_evaluate", "robust_policy",
]
