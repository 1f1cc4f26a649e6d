"""
Model predictive control with the cross-entropy method.

At every step the planner samples action sequences, scores each by unrolling
the transition model from the current force state and summing the
force/torque mismatch to the goal state, refits a per-step Gaussian to the
elite sequences and finally executes the first action of the mean sequence.

Usage:
    >>> planner = CEMPlanner(model, PlanConfig())
    >>> result = run_mpc_episode(simulator, planner, (2.0, 0.5), goal, seed=4)
    >>> result.success, result.steps_taken
"""

# pylint: disable=too-many-instance-attributes
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Protocol, Sequence, Tuple, Union

import numpy as np

from ..core.constants import (
    CEM_CLIP_SIGMAS,
    CEM_STD_FLOOR_MM,
    COST_ALPHA,
    COST_BETA,
    DEFAULT_CEM_HORIZON,
    DEFAULT_CEM_INIT_STD_MM,
    DEFAULT_CEM_ITERS,
    DEFAULT_CEM_SAMPLES,
    DEFAULT_ELITE_FRAC,
    DEFAULT_GRID_RANGE_MM,
    DEFAULT_MAX_STEPS,
    DEFAULT_SUCCESS_RADIUS_MM,
    FORCE_DIMS,
    START_RING_RADIUS_MM,
    START_RING_SPREAD_MM,
    STATE_DIM,
)
from ..core.instrumentation import log_operation
from ..core.seeding import derive_seed, make_rng
from ..dynamics.protocols import TransitionModel
from ..sim.contact import ContactSimulator, MultiPoseReading
from ..sim.state import ForceState

logger = logging.getLogger(__name__)

StateLike = Union[ForceState, np.ndarray, Sequence[float]]


def _values(state: StateLike) -> np.ndarray:
    if isinstance(state, ForceState):
        return state.values
    return np.asarray(state, dtype=float)


@dataclass(frozen=True)
class PlanConfig:
    """
    Cross-entropy planner settings.

    Attributes:
        n_samples: Sequences sampled per iteration
        horizon: Planned steps T
        cem_iters: Refit rounds
        elite_frac: Share of samples kept as elites
        init_std: Initial per-axis std in mm
        alpha: Weight of the force mismatch
        beta: Weight of the torque mismatch
        std_floor: Lower bound of the refit std in mm
        clip_sigmas: Samples are clipped to this many initial stds per axis
        common_random_numbers: Reuse one standard-normal draw across iterations
    """

    n_samples: int = DEFAULT_CEM_SAMPLES
    horizon: int = DEFAULT_CEM_HORIZON
    cem_iters: int = DEFAULT_CEM_ITERS
    elite_frac: float = DEFAULT_ELITE_FRAC
    init_std: Tuple[float, float] = (DEFAULT_CEM_INIT_STD_MM, DEFAULT_CEM_INIT_STD_MM)
    alpha: float = COST_ALPHA
    beta: float = COST_BETA
    std_floor: float = CEM_STD_FLOOR_MM
    clip_sigmas: float = CEM_CLIP_SIGMAS
    common_random_numbers: bool = False

    def __post_init__(self) -> None:
        if self.n_samples < 1:
            raise ValueError(f"n_samples must be at least 1, got {self.n_samples}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be at least 1, got {self.horizon}")
        if self.cem_iters < 1:
            raise ValueError(f"cem_iters must be at least 1, got {self.cem_iters}")
        if not 0.0 < self.elite_frac <= 1.0:
            raise ValueError(f"elite_frac must be in (0, 1], got {self.elite_frac}")
        if len(self.init_std) != 2 or min(self.init_std) <= 0:
            raise ValueError(f"init_std must be two positive values, got {self.init_std}")
        if self.std_floor <= 0 or self.clip_sigmas <= 0:
            raise ValueError("std_floor and clip_sigmas must be positive")

    @property
    def elite_count(self) -> int:
        """Number of elites, at least 1 and at most n_samples."""
        return min(self.n_samples, max(1, int(round(self.elite_frac * self.n_samples))))

    @property
    def action_limit(self) -> np.ndarray:
        """Per-axis absolute action bound in mm."""
        return self.clip_sigmas * np.asarray(self.init_std, dtype=float)


def state_costs(
    predicted: np.ndarray, goal: StateLike, alpha: float = COST_ALPHA, beta: float = COST_BETA
) -> np.ndarray:
    """Vectorized ``state_cost`` over the last axis of ``(..., 30)`` predictions."""
    diff = _values(goal) - np.asarray(predicted, dtype=float)
    force = np.sum(diff[..., :FORCE_DIMS] ** 2, axis=-1)
    torque = np.sum(diff[..., FORCE_DIMS:] ** 2, axis=-1)
    return np.asarray(alpha * force + beta * torque)


def state_cost(
    predicted: StateLike, goal: StateLike, alpha: float = COST_ALPHA, beta: float = COST_BETA
) -> float:
    """
    Weighted squared mismatch between a state and the goal.

    ``alpha * ||goal_force - force||^2 + beta * ||goal_torque - torque||^2``
    with the 15/15 force/torque split.
    """
    return float(state_costs(_values(predicted), goal, alpha, beta))


def rollout_costs(
    model: TransitionModel,
    state: StateLike,
    action_seqs: np.ndarray,
    goal: StateLike,
    alpha: float = COST_ALPHA,
    beta: float = COST_BETA,
) -> np.ndarray:
    """
    Summed predicted costs of ``(N, T, 2)`` action sequences.

    Each sequence is unrolled free-running from the same start state with a
    fresh hidden value.
    """
    seqs = np.asarray(action_seqs, dtype=float)
    count = seqs.shape[0]
    states = np.repeat(_values(state).reshape(1, STATE_DIM), count, axis=0)
    hidden = model.initial_hidden(states)
    totals = np.zeros(count)
    for t in range(seqs.shape[1]):
        states, hidden = model.forward(states, seqs[:, t], hidden)
        totals += state_costs(states, goal, alpha, beta)
    return totals


def rollout_cost(
    model: TransitionModel,
    state: StateLike,
    action_seq: np.ndarray,
    goal: StateLike,
    config: Optional[PlanConfig] = None,
) -> float:
    """
    Predicted cost of one ``(T, 2)`` action sequence.

    Raises:
        ValueError: If the sequence length differs from ``config.horizon``
    """
    config = config or PlanConfig()
    seq = np.asarray(action_seq, dtype=float).reshape(-1, 2)
    if seq.shape[0] != config.horizon:
        raise ValueError(f"Expected {config.horizon} actions, got {seq.shape[0]}")
    return float(rollout_costs(model, state, seq[None], goal, config.alpha, config.beta)[0])


@dataclass(frozen=True, eq=False)
class PlanResult:
    """
    Outcome of one planning call.

    Attributes:
        action: First action to execute, mm
        mean_sequence: Final ``(T, 2)`` mean sequence
        elite_costs: Mean elite cost per iteration
    """

    action: np.ndarray
    mean_sequence: np.ndarray
    elite_costs: Tuple[float, ...] = ()


class Planner(Protocol):
    """Anything that turns a force state into a lateral action."""

    name: str

    def plan(self, state: StateLike, goal: StateLike, rng: np.random.Generator) -> PlanResult:
        """Choose the next action."""


class CEMPlanner:
    """Cross-entropy planner over a transition model."""

    name = "mpc"

    def __init__(self, model: TransitionModel, config: Optional[PlanConfig] = None) -> None:
        self.model = model
        self.config = config or PlanConfig()

    def plan(self, state: StateLike, goal: StateLike, rng: np.random.Generator) -> PlanResult:
        """
        Optimize an action sequence and return its first action.

        Args:
            state: Current force state
            goal: Goal force state
            rng: Sampling source

        Returns:
            PlanResult with the first mean action and the elite-cost history
        """
        cfg = self.config
        shape = (cfg.n_samples, cfg.horizon, 2)
        limit = cfg.action_limit
        mean = np.zeros((cfg.horizon, 2))
        std = np.broadcast_to(np.asarray(cfg.init_std, dtype=float), (cfg.horizon, 2)).copy()
        shared = rng.standard_normal(shape) if cfg.common_random_numbers else None
        history: List[float] = []

        for iteration in range(cfg.cem_iters):
            noise = shared if shared is not None else rng.standard_normal(shape)
            samples = np.clip(mean + std * noise, -limit, limit)
            costs = rollout_costs(self.model, state, samples, goal, cfg.alpha, cfg.beta)
            elite_idx = np.argsort(costs, kind="stable")[: cfg.elite_count]
            elites = samples[elite_idx]
            history.append(float(costs[elite_idx].mean()))
            mean = elites.mean(axis=0)
            std = np.maximum(elites.std(axis=0), cfg.std_floor)
            logger.debug("CEM iteration %d elite cost %.6f", iteration, history[-1])

        return PlanResult(
            action=np.clip(mean[0], -limit, limit),
            mean_sequence=mean,
            elite_costs=tuple(history),
        )


class RandomPlanner:
    """Negative-control planner: one clipped Gaussian action per step."""

    name = "random"

    def __init__(self, config: Optional[PlanConfig] = None) -> None:
        self.config = config or PlanConfig()

    def plan(  # pylint: disable=unused-argument
        self, state: StateLike, goal: StateLike, rng: np.random.Generator
    ) -> PlanResult:
        """Draw an action ignoring the state."""
        limit = self.config.action_limit
        action = np.clip(rng.standard_normal(2) * np.asarray(self.config.init_std), -limit, limit)
        return PlanResult(action=action, mean_sequence=action.reshape(1, 2))


def cem_plan(
    model: TransitionModel,
    state: StateLike,
    goal: StateLike,
    config: Optional[PlanConfig] = None,
    seed: int = 0,
) -> np.ndarray:
    """First action of a CEM plan; deterministic per seed."""
    planner = CEMPlanner(model, config)
    return planner.plan(state, goal, np.random.default_rng(seed)).action


def sample_start_offset(
    rng: np.random.Generator,
    radius: float = START_RING_RADIUS_MM,
    spread: float = START_RING_SPREAD_MM,
    grid_range: Tuple[float, float] = (DEFAULT_GRID_RANGE_MM, DEFAULT_GRID_RANGE_MM),
    max_tries: int = 10000,
) -> np.ndarray:
    """
    Draw a start offset on the ``radius +- spread`` ring inside the grid range.

    Angle and radius are uniform; draws outside the range are rejected.

    Raises:
        ValueError: If no draw lands inside the range
    """
    half = np.asarray(grid_range, dtype=float) / 2.0
    for _ in range(max_tries):
        angle = rng.uniform(0.0, 2.0 * math.pi)
        r = rng.uniform(radius - spread, radius + spread)
        offset = np.array([r * math.cos(angle), r * math.sin(angle)])
        if np.all(np.abs(offset) <= half):
            return offset
    raise ValueError(f"Ring {radius} +- {spread} mm does not meet grid range {grid_range}")


@dataclass
class TrialResult:
    """
    Outcome of one insertion trial.

    Attributes:
        steps_taken: Actions executed
        success: True if the peg ended within the success radius or inserted
        final_distance: Offset norm at the end in mm
        costs: Goal mismatch of the observed state per executed step
        distances: Offset norm after each step, starting with the initial one
        positions: Offsets visited, starting with the initial one
    """

    steps_taken: int
    success: bool
    final_distance: float
    costs: List[float] = field(default_factory=list)
    distances: List[float] = field(default_factory=list)
    positions: List[Tuple[float, float]] = field(default_factory=list)

    def distance_at(self, step: int) -> float:
        """Distance after ``step`` actions; holds the last value after the trial ends."""
        return self.distances[min(step, len(self.distances) - 1)]


ActionChooser = Callable[[ForceState, np.random.Generator], np.ndarray]


def _succeeded(position: np.ndarray, reading: MultiPoseReading, success_radius: float) -> bool:
    return bool(np.linalg.norm(position) <= success_radius or reading.all_inserted)


@log_operation(threshold_s=30.0)
def run_episode(
    simulator: ContactSimulator,
    choose_action: ActionChooser,
    start_offset: Union[Sequence[float], np.ndarray],
    goal: StateLike,
    max_steps: int = DEFAULT_MAX_STEPS,
    success_radius: float = DEFAULT_SUCCESS_RADIUS_MM,
    seed: int = 0,
    alpha: float = COST_ALPHA,
    beta: float = COST_BETA,
) -> TrialResult:
    """
    Probe, act and re-probe until success or ``max_steps`` actions.

    Every probe draws sensor noise from the episode generator.

    Args:
        simulator: Environment stand-in
        choose_action: Maps the observed state to a lateral move
        start_offset: Initial offset in mm
        goal: Goal force state, used for the logged mismatch
        max_steps: Action budget
        success_radius: Distance counted as aligned
        seed: Episode seed (noise and planner sampling)

    Returns:
        TrialResult
    """
    rng = np.random.default_rng(seed)
    position = np.asarray(start_offset, dtype=float).reshape(2).copy()
    reading = simulator.probe(position, rng)
    result = TrialResult(
        steps_taken=0,
        success=False,
        final_distance=float(np.linalg.norm(position)),
        distances=[float(np.linalg.norm(position))],
        positions=[(float(position[0]), float(position[1]))],
    )

    for step in range(max_steps + 1):
        if _succeeded(position, reading, success_radius):
            result.success = True
            break
        if step == max_steps:
            break
        action = np.asarray(choose_action(reading.state, rng), dtype=float).reshape(2)
        mismatch = state_cost(reading.state, goal, alpha, beta)
        position = position + action
        reading = simulator.probe(position, rng)
        result.steps_taken = step + 1
        result.costs.append(mismatch)
        result.distances.append(float(np.linalg.norm(position)))
        result.positions.append((float(position[0]), float(position[1])))
        logger.debug(
            "Step %d: action (%.3f, %.3f) distance %.3f mismatch %.5f",
            step + 1,
            action[0],
            action[1],
            result.distances[-1],
            mismatch,
        )

    result.final_distance = result.distances[-1]
    return result


def planner_chooser(planner: Planner, goal: StateLike) -> ActionChooser:
    """Adapt a planner to the episode runner."""

    def choose(state: ForceState, rng: np.random.Generator) -> np.ndarray:
        return planner.plan(state, goal, rng).action

    return choose


def run_mpc_episode(
    simulator: ContactSimulator,
    planner: Planner,
    start_offset: Union[Sequence[float], np.ndarray],
    goal: StateLike,
    max_steps: int = DEFAULT_MAX_STEPS,
    success_radius: float = DEFAULT_SUCCESS_RADIUS_MM,
    seed: int = 0,
) -> TrialResult:
    """
    One closed-loop trial driven by a planner (CEM or the random baseline).

    Args:
        simulator: Environment stand-in for the target hole
        planner: CEMPlanner over a transition model, or RandomPlanner
        start_offset: Initial offset, within the grid range
        goal: Goal force state of the hole
        max_steps: Action budget
        success_radius: Distance counted as aligned
        seed: Episode seed

    Returns:
        TrialResult
    """

    alpha = getattr(getattr(planner, "config", None), "alpha", COST_ALPHA)
    beta = getattr(getattr(planner, "config", None), "beta", COST_BETA)
    return run_episode(
        simulator,
        planner_chooser(planner, goal),
        start_offset,
        goal,
        max_steps=max_steps,
        success_radius=success_radius,
        seed=seed,
        alpha=alpha,
        beta=beta,
    )


def run_trials(
    simulator: ContactSimulator,
    choose_action: ActionChooser,
    goal: StateLike,
    trials: int,
    seed: int = 0,
    max_steps: int = DEFAULT_MAX_STEPS,
    success_radius: float = DEFAULT_SUCCESS_RADIUS_MM,
    grid_range: Tuple[float, float] = (DEFAULT_GRID_RANGE_MM, DEFAULT_GRID_RANGE_MM),
    alpha: float = COST_ALPHA,
    beta: float = COST_BETA,
) -> List[TrialResult]:
    """
    Run a batch of trials from ring start offsets.

    Trial ``i`` starts at an offset drawn from ``derive_seed(seed, "start", i)``
    and runs with ``derive_seed(seed, "trial", i)``, so controllers evaluated
    with the same seed face the same starts. ``alpha`` and ``beta`` weight the
    recorded per-step mismatch.
    """
    results = []
    for index in range(trials):
        start = sample_start_offset(make_rng(seed, "start", index), grid_range=grid_range)
        results.append(
            run_episode(
                simulator,
                choose_action,
                start,
                goal,
                max_steps=max_steps,
                success_radius=success_radius,
                seed=derive_seed(seed, "trial", index),
                alpha=alpha,
                beta=beta,
            )
        )
    return results


def success_rate(results: Sequence[TrialResult]) -> float:
    """Share of successful trials; 0 for an empty batch."""
    if not results:
        return 0.0
    return sum(1 for result in results if result.success) / len(results)
