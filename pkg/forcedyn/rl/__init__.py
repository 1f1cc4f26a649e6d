"""
Reinforcement learning package: discrete moves, the similarity reward, the
actor-critic policy and its offline training against a transition model.

Examples:
    >>> from forcedyn.rl import init_policy, train_offline, eval_policy
    >>> policy = init_policy(norm_stats=model.norm_stats, sigma=sigma)
    >>> report = train_offline(policy, model, grid, episodes=3000, goal=goal)
    >>> evaluation = eval_policy(simulator, policy, goal, trials=100)
"""

from .a2c import (
    Episode,
    ModelStepper,
    PolicyTrainReport,
    a2c_update,
    collect_episode,
    discounted_returns,
    initial_indices,
    train_offline,
)
from .actions import (
    ACTION_COUNT,
    DEFAULT_STEP_SIZE_MM,
    DiscreteAction,
    Direction,
    action_table,
    action_vector,
)
from .evaluation import PolicyEvaluation, eval_policy, greedy_chooser
from .online import OnlineReport, SimulatorStepper, train_online
from .policy import (
    PolicyConfig,
    PolicyModel,
    init_policy,
    load_policy,
    policy_forward,
    save_policy,
    softmax,
)
from .reward import RewardConfig, reward, rewards, sigma_from_grid, similarities, similarity

__all__ = [
    "Direction",
    "DiscreteAction",
    "ACTION_COUNT",
    "DEFAULT_STEP_SIZE_MM",
    "action_vector",
    "action_table",
    "RewardConfig",
    "similarity",
    "similarities",
    "reward",
    "rewards",
    "sigma_from_grid",
    "PolicyConfig",
    "PolicyModel",
    "init_policy",
    "policy_forward",
    "softmax",
    "save_policy",
    "load_policy",
    "Episode",
    "PolicyTrainReport",
    "ModelStepper",
    "collect_episode",
    "discounted_returns",
    "a2c_update",
    "initial_indices",
    "train_offline",
    "PolicyEvaluation",
    "greedy_chooser",
    "eval_policy",
    "OnlineReport",
    "SimulatorStepper",
    "train_online",
]
