"""
Dynamics package: the learned force-state transition model, its training,
evaluation, grid-oracle stand-in and file format.

Examples:
    >>> from forcedyn.dynamics import init_model, train, eval_error
    >>> model = init_model(seed=1)
    >>> report = train(model, trajectories, episodes=4000)
    >>> err = eval_error(model, held_out)
"""

from .evaluation import SequenceBatch, eval_error, gradient_check, weighted_error
from .lstm import PARAM_ORDER, LSTMState
from .model import DynamicsConfig, DynamicsModel, NormStats, forward, init_model
from .oracle import GridOracleDynamics
from .protocols import TransitionModel
from .serialization import load_container, load_model, save_container, save_model
from .training import Adam, TrainReport, clip_gradients, episodes_to_reach, finetune, train

__all__ = [
    "TransitionModel",
    "LSTMState",
    "PARAM_ORDER",
    "DynamicsConfig",
    "DynamicsModel",
    "NormStats",
    "init_model",
    "forward",
    "Adam",
    "clip_gradients",
    "TrainReport",
    "train",
    "finetune",
    "episodes_to_reach",
    "SequenceBatch",
    "eval_error",
    "weighted_error",
    "gradient_check",
    "GridOracleDynamics",
    "save_container",
    "load_container",
    "save_model",
    "load_model",
]
