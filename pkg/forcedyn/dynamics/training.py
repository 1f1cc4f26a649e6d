"""
Supervised training of the dynamics model by backpropagation through time.

Each episode draws a minibatch of trajectories, unrolls the network with
teacher forcing, takes the mean squared error between predicted and
ground-truth successor states in normalized units, clips the gradient norm
and applies one Adam step.

Usage:
    >>> report = train(model, trajectories, episodes=4000, trajs_per_episode=20, seed=1)
    >>> report = finetune(model, target_trajectories, episodes=500, seed=2)
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.constants import FINETUNE_LR_SCALE, GRADIENT_CLIP_NORM
from ..core.exceptions import DivergenceError
from ..core.instrumentation import log_operation
from ..data.trajectories import Trajectory, stack_trajectories
from . import lstm
from .model import DynamicsModel

logger = logging.getLogger(__name__)

EvalCallback = Callable[[DynamicsModel], float]


class Adam:
    """
    Adam optimizer over a dict of numpy arrays, updated in place.
    """

    def __init__(
        self,
        learning_rate: float,
        beta1: float = 0.9,
        beta2: float = 0.999,
        epsilon: float = 1e-8,
    ) -> None:
        if learning_rate < 0:
            raise ValueError(f"learning_rate must be non-negative, got {learning_rate}")
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.steps = 0
        self._m: Dict[str, np.ndarray] = {}
        self._v: Dict[str, np.ndarray] = {}

    def step(self, params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray]) -> None:
        """Apply one update to every parameter that has a gradient."""
        self.steps += 1
        correction1 = 1.0 - self.beta1**self.steps
        correction2 = 1.0 - self.beta2**self.steps
        for name, grad in grads.items():
            m = self._m.setdefault(name, np.zeros_like(grad))
            v = self._v.setdefault(name, np.zeros_like(grad))
            m *= self.beta1
            m += (1.0 - self.beta1) * grad
            v *= self.beta2
            v += (1.0 - self.beta2) * grad * grad
            update = (m / correction1) / (np.sqrt(v / correction2) + self.epsilon)
            params[name] -= self.learning_rate * update


def clip_gradients(grads: Dict[str, np.ndarray], max_norm: float) -> float:
    """
    Scale gradients in place so their global norm is at most ``max_norm``.

    Returns:
        The global norm before clipping
    """
    norm = float(np.sqrt(sum(float(np.sum(g * g)) for g in grads.values())))
    if norm > max_norm > 0:
        scale = max_norm / norm
        for grad in grads.values():
            grad *= scale
    return norm


@dataclass
class TrainReport:
    """
    Outcome of a training or finetuning run.

    Attributes:
        episodes_run: Number of optimizer steps taken
        losses: Training loss per episode (normalized units)
        wall_seconds: Elapsed wall-clock time
        checkpoints: (episode, evaluation error) pairs from the evaluation callback
    """

    episodes_run: int = 0
    losses: List[float] = field(default_factory=list)
    wall_seconds: float = 0.0
    checkpoints: List[Tuple[int, float]] = field(default_factory=list)

    @property
    def final_loss(self) -> Optional[float]:
        """Loss of the last episode, if any ran."""
        return self.losses[-1] if self.losses else None


def episodes_to_reach(report: TrainReport, threshold: float) -> Optional[int]:
    """First checkpoint episode whose error is at or below ``threshold``."""
    for episode, err in report.checkpoints:
        if err <= threshold:
            return episode
    return None


def batch_loss(
    model: DynamicsModel, states: np.ndarray, actions: np.ndarray
) -> Tuple[float, Dict[str, np.ndarray]]:
    """
    Teacher-forced MSE loss and gradients of raw ``(B, T+1, 30)``/``(B, T, 2)`` arrays.
    """
    normalized = model.norm_stats.normalize_states(states)
    inputs = np.concatenate(
        [normalized[:, :-1], model.norm_stats.normalize_actions(actions)], axis=-1
    )
    return lstm.sequence_loss(model.params, inputs, normalized[:, 1:])


def _run(
    model: DynamicsModel,
    trajectories: Sequence[Trajectory],
    episodes: int,
    trajs_per_episode: int,
    learning_rate: float,
    seed: int,
    fit_norm: bool,
    eval_fn: Optional[EvalCallback],
    eval_every: int,
    log_every: int,
) -> TrainReport:
    if episodes < 0:
        raise ValueError(f"episodes must be non-negative, got {episodes}")
    if trajs_per_episode < 1:
        raise ValueError(f"trajs_per_episode must be at least 1, got {trajs_per_episode}")
    states, actions = stack_trajectories(list(trajectories))
    if actions.shape[1] < 1:
        raise ValueError("Training trajectories need at least one action")
    if fit_norm:
        model.fit_norm_stats(states, actions)

    rng = np.random.default_rng(seed)
    optimizer = Adam(learning_rate)
    report = TrainReport()
    count = states.shape[0]
    started = time.perf_counter()

    if eval_fn is not None and eval_every > 0:
        report.checkpoints.append((0, float(eval_fn(model))))

    for episode in range(1, episodes + 1):
        chosen = rng.choice(count, size=trajs_per_episode, replace=count < trajs_per_episode)
        loss, grads = batch_loss(model, states[chosen], actions[chosen])
        if not np.isfinite(loss):
            raise DivergenceError("Dynamics training loss is not finite", episode, loss)
        clip_gradients(grads, GRADIENT_CLIP_NORM)
        optimizer.step(model.params, grads)
        report.losses.append(loss)
        report.episodes_run = episode

        if log_every > 0 and episode % log_every == 0:
            logger.info("Episode %d/%d loss %.6f", episode, episodes, loss)
        if eval_fn is not None and eval_every > 0 and episode % eval_every == 0:
            err = float(eval_fn(model))
            report.checkpoints.append((episode, err))
            logger.info("Episode %d evaluation error %.6f", episode, err)

    report.wall_seconds = time.perf_counter() - started
    return report


@log_operation(threshold_s=600.0)
def train(
    model: DynamicsModel,
    trajectories: Sequence[Trajectory],
    episodes: int,
    trajs_per_episode: int = 20,
    seed: int = 0,
    learning_rate: Optional[float] = None,
    eval_fn: Optional[EvalCallback] = None,
    eval_every: int = 0,
    log_every: int = 100,
) -> TrainReport:
    """
    Pretrain a model, fitting its normalization to the training set first.

    Args:
        model: Model to train in place
        trajectories: Equal-length training trajectories
        episodes: Number of minibatch updates
        trajs_per_episode: Trajectories per minibatch
        seed: Minibatch sampling seed
        learning_rate: Adam step size; ``model.config.learning_rate`` if omitted
        eval_fn: Called on the model every ``eval_every`` episodes (and at 0)
        eval_every: Checkpoint period; 0 disables checkpoints
        log_every: Loss logging period

    Returns:
        TrainReport

    Raises:
        DivergenceError: If the loss becomes non-finite
        ValueError: If the trajectories are empty or have no actions
    """
    lr = model.config.learning_rate if learning_rate is None else learning_rate
    return _run(
        model,
        trajectories,
        episodes,
        trajs_per_episode,
        learning_rate=lr,
        seed=seed,
        fit_norm=True,
        eval_fn=eval_fn,
        eval_every=eval_every,
        log_every=log_every,
    )


@log_operation(threshold_s=600.0)
def finetune(
    model: DynamicsModel,
    trajectories: Sequence[Trajectory],
    episodes: int,
    trajs_per_episode: int = 20,
    seed: int = 0,
    learning_rate: Optional[float] = None,
    eval_fn: Optional[EvalCallback] = None,
    eval_every: int = 0,
    log_every: int = 100,
) -> TrainReport:
    """
    Continue training on target-hole data, keeping the existing normalization.

    The default step size is ``FINETUNE_LR_SCALE`` times the pretraining one.
    Arguments and errors are as for ``train``.
    """
    lr = learning_rate
    if lr is None:
        lr = model.config.learning_rate * FINETUNE_LR_SCALE
    return _run(
        model,
        trajectories,
        episodes,
        trajs_per_episode,
        learning_rate=lr,
        seed=seed,
        fit_norm=False,
        eval_fn=eval_fn,
        eval_every=eval_every,
        log_every=log_every,
    )
