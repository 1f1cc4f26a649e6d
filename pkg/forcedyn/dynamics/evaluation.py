"""
Dynamics evaluation: the held-out force estimation error and an
analytic-versus-numeric gradient check.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence

import numpy as np

from ..core.constants import FORCE_DIMS, HELD_OUT_TRAJECTORIES, TORQUE_ERROR_WEIGHT
from ..core.instrumentation import log_operation
from ..data.trajectories import Trajectory, stack_trajectories
from .model import DynamicsModel
from .protocols import TransitionModel
from .training import batch_loss

logger = logging.getLogger(__name__)

GradientHook = Callable[[Dict[str, np.ndarray]], Dict[str, np.ndarray]]


@dataclass(frozen=True, eq=False)
class SequenceBatch:
    """
    Raw-unit sequences stacked for batch evaluation.

    Attributes:
        states: ``(B, T+1, 30)``
        actions: ``(B, T, 2)``
    """

    states: np.ndarray
    actions: np.ndarray

    @classmethod
    def from_trajectories(cls, trajectories: Sequence[Trajectory]) -> "SequenceBatch":
        """Stack equal-length trajectories."""
        states, actions = stack_trajectories(list(trajectories))
        return cls(states, actions)

    @property
    def size(self) -> int:
        """Number of sequences B."""
        return int(self.states.shape[0])

    @property
    def steps(self) -> int:
        """Number of actions T."""
        return int(self.actions.shape[1])


def weighted_error(predicted: np.ndarray, actual: np.ndarray) -> np.ndarray:
    """
    ``||force diff||^2 + 100 * ||torque diff||^2`` over the last axis.
    """
    diff = np.asarray(predicted, dtype=float) - np.asarray(actual, dtype=float)
    force = np.sum(diff[..., :FORCE_DIMS] ** 2, axis=-1)
    torque = np.sum(diff[..., FORCE_DIMS:] ** 2, axis=-1)
    return np.asarray(force + TORQUE_ERROR_WEIGHT * torque)


@log_operation(threshold_s=60.0)
def eval_error(model: TransitionModel, trajectories: Sequence[Trajectory]) -> float:
    """
    Force estimation error over held-out trajectories.

    Predictions are teacher forced: the ground-truth state is fed at every
    step. Per trajectory the weighted error is summed over steps in raw
    units; the result is the mean over trajectories.

    Args:
        model: Any TransitionModel
        trajectories: Held-out trajectories (conventionally 20)

    Returns:
        Mean per-trajectory error

    Raises:
        ValueError: If no trajectories are given
    """
    batch = SequenceBatch.from_trajectories(trajectories)
    if batch.size != HELD_OUT_TRAJECTORIES:
        logger.warning(
            "Evaluating on %d trajectories; the held-out convention is %d",
            batch.size,
            HELD_OUT_TRAJECTORIES,
        )
    hidden = model.initial_hidden(batch.states[:, 0])
    totals = np.zeros(batch.size)
    for t in range(batch.steps):
        predicted, hidden = model.forward(batch.states[:, t], batch.actions[:, t], hidden)
        totals += weighted_error(predicted, batch.states[:, t + 1])
    return float(totals.mean())


def _relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    denominator = float(np.linalg.norm(analytic) + np.linalg.norm(numeric))
    if denominator == 0.0:
        return 0.0
    return float(np.linalg.norm(analytic - numeric)) / denominator


def gradient_check(
    model: DynamicsModel,
    probe_batch: SequenceBatch,
    step: float = 1e-5,
    gradient_hook: Optional[GradientHook] = None,
) -> float:
    """
    Compare BPTT gradients with central finite differences.

    Every scalar parameter is perturbed by ``+-step``; per tensor the
    relative error ``|a - n| / (|a| + |n|)`` is computed and the maximum over
    tensors returned. The model is left unchanged.

    Args:
        model: Model to check (keep H small)
        probe_batch: Raw-unit sequences, typically 3 steps
        step: Finite-difference step
        gradient_hook: Applied to the analytic gradients before comparison

    Returns:
        Maximum relative error; 0 for a zero-length sequence
    """
    if probe_batch.steps == 0:
        return 0.0
    _, analytic = batch_loss(model, probe_batch.states, probe_batch.actions)
    if gradient_hook is not None:
        analytic = gradient_hook(analytic)

    worst = 0.0
    for name, param in model.params.items():
        numeric = np.zeros_like(param)
        flat = param.reshape(-1)
        numeric_flat = numeric.reshape(-1)
        for index in range(flat.size):
            original = flat[index]
            flat[index] = original + step
            plus, _ = batch_loss(model, probe_batch.states, probe_batch.actions)
            flat[index] = original - step
            minus, _ = batch_loss(model, probe_batch.states, probe_batch.actions)
            flat[index] = original
            numeric_flat[index] = (plus - minus) / (2.0 * step)
        error = _relative_error(analytic[name], numeric)
        logger.debug("Gradient check %s: relative error %.3e", name, error)
        worst = max(worst, error)
    return worst
