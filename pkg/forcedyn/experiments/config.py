"""
Experiment configuration.

An ExperimentConfig is a tree of frozen dataclasses, one per section. On disk
it is a YAML mapping of section names to flat key/value mappings; any key can
be overridden from the command line with ``--set section.key=value``.

Example file::

    experiment:
      seed: 3
      out: runs/seed3
    dynamics:
      episodes: 4000
    mpc:
      trials: 100

Usage:
    >>> config = load_config("experiment.yaml", overrides=["mpc.trials=20"])
    >>> config.mpc.trials
    20
"""

import dataclasses
import hashlib
import logging
import types
import typing
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Tuple, Union

import yaml

from ..control.mpc import PlanConfig
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
    DEFAULT_F_MAX_N,
    DEFAULT_FOOTPRINT_RESOLUTION,
    DEFAULT_FORCE_NOISE_N,
    DEFAULT_GRID_N,
    DEFAULT_GRID_RANGE_MM,
    DEFAULT_HIDDEN_SIZE,
    DEFAULT_LEARNING_RATE,
    DEFAULT_MAX_STEPS,
    DEFAULT_SUCCESS_RADIUS_MM,
    DEFAULT_TORQUE_NOISE_NM,
    DEFAULT_TRAJECTORY_STEPS,
    DISCOUNT,
    ENTROPY_WEIGHT,
    GOAL_REWARD,
    HELD_OUT_TRAJECTORIES,
    RL_EPISODE_HORIZON,
    STEP_REWARD,
    SUCCESS_THRESHOLD,
    VALUE_LOSS_WEIGHT,
)
from ..core.exceptions import ConfigError
from ..geometry.catalog import BENCHMARK_HOLES
from ..rl.actions import DEFAULT_STEP_SIZE_MM
from ..rl.policy import PolicyConfig
from ..rl.reward import RewardConfig
from ..sim.contact import SensorNoise

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

DATA_FRACTIONS = (0.02, 0.2, 0.4, 0.6, 0.8, 1.0)


@dataclass(frozen=True)
class SimSection:
    """Contact simulator settings."""

    f_max: float = DEFAULT_F_MAX_N
    force_noise: float = DEFAULT_FORCE_NOISE_N
    torque_noise: float = DEFAULT_TORQUE_NOISE_NM
    resolution: float = DEFAULT_FOOTPRINT_RESOLUTION
    clearance_jitter: float = 0.0

    def noise(self) -> SensorNoise:
        """Sensor noise of controller and online-training probes."""
        return SensorNoise(force=self.force_noise, torque=self.torque_noise)


@dataclass(frozen=True)
class GridSection:
    """Grid sampling settings shared by training and testing holes."""

    n: int = DEFAULT_GRID_N
    range_x: float = DEFAULT_GRID_RANGE_MM
    range_y: float = DEFAULT_GRID_RANGE_MM

    @property
    def grid_range(self) -> Tuple[float, float]:
        """(R_x, R_y) in mm."""
        return (self.range_x, self.range_y)


@dataclass(frozen=True)
class DatasetSection:
    """
    Offline trajectory synthesis.

    ``action_std`` of None means half the lattice spacing.
    """

    trajectories: int = 400
    steps: int = DEFAULT_TRAJECTORY_STEPS
    action_std: Optional[float] = None
    held_out: int = HELD_OUT_TRAJECTORIES
    training_holes: Tuple[str, ...] = ()


@dataclass(frozen=True)
class DynamicsSection:
    """Pretraining of the transition model."""

    hidden_size: int = DEFAULT_HIDDEN_SIZE
    learning_rate: float = DEFAULT_LEARNING_RATE
    episodes: int = 4000
    trajs_per_episode: int = 20
    log_every: int = 100


@dataclass(frozen=True)
class FinetuneSection:
    """
    Finetuning on testing holes.

    ``learning_rate`` of None scales the pretraining rate down.
    """

    episodes: int = 1000
    trajectories: int = 400
    learning_rate: Optional[float] = None
    fractions: Tuple[float, ...] = DATA_FRACTIONS
    eval_every: int = 100
    scratch: bool = True


@dataclass(frozen=True)
class MpcSection:
    """Planner settings and the controller benchmark."""

    n_samples: int = DEFAULT_CEM_SAMPLES
    horizon: int = DEFAULT_CEM_HORIZON
    cem_iters: int = DEFAULT_CEM_ITERS
    elite_frac: float = DEFAULT_ELITE_FRAC
    init_std: float = DEFAULT_CEM_INIT_STD_MM
    alpha: float = COST_ALPHA
    beta: float = COST_BETA
    std_floor: float = CEM_STD_FLOOR_MM
    clip_sigmas: float = CEM_CLIP_SIGMAS
    common_random_numbers: bool = False
    trials: int = 100
    max_steps: int = DEFAULT_MAX_STEPS
    success_radius: float = DEFAULT_SUCCESS_RADIUS_MM
    data_fractions: Tuple[float, ...] = (0.2,)
    random_baseline: bool = True
    oracle_baseline: bool = False
    oracle_training_holes: bool = False

    def plan_config(self) -> PlanConfig:
        """Planner settings as a PlanConfig."""
        return PlanConfig(
            n_samples=self.n_samples,
            horizon=self.horizon,
            cem_iters=self.cem_iters,
            elite_frac=self.elite_frac,
            init_std=(self.init_std, self.init_std),
            alpha=self.alpha,
            beta=self.beta,
            std_floor=self.std_floor,
            clip_sigmas=self.clip_sigmas,
            common_random_numbers=self.common_random_numbers,
        )


@dataclass(frozen=True)
class RewardSection:
    """
    Reward settings.

    ``sigma`` of None derives the bandwidth from each hole's grid.
    """

    sigma: Optional[float] = None
    epsilon: float = SUCCESS_THRESHOLD
    goal_reward: float = GOAL_REWARD
    step_reward: float = STEP_REWARD

    def reward_config(self, sigma: float) -> RewardConfig:
        """RewardConfig with the given bandwidth unless one is configured."""
        return RewardConfig(
            sigma=self.sigma if self.sigma is not None else sigma,
            epsilon=self.epsilon,
            goal_reward=self.goal_reward,
            step_reward=self.step_reward,
        )


@dataclass(frozen=True)
class RlSection:
    """Policy training and evaluation, offline and online."""

    hidden_size: int = DEFAULT_HIDDEN_SIZE
    learning_rate: float = DEFAULT_LEARNING_RATE
    discount: float = DISCOUNT
    entropy_weight: float = ENTROPY_WEIGHT
    value_weight: float = VALUE_LOSS_WEIGHT
    step_size: float = DEFAULT_STEP_SIZE_MM
    episodes: int = 3000
    horizon: int = RL_EPISODE_HORIZON
    log_every: int = 100
    data_fraction: float = 0.2
    trials: int = 100
    online_episodes: int = 5000
    online_eval_every: int = 100
    online_eval_trials: int = 20
    target_success: float = 0.85

    def policy_config(self, seed: int) -> PolicyConfig:
        """Policy hyperparameters as a PolicyConfig."""
        return PolicyConfig(
            hidden_size=self.hidden_size,
            learning_rate=self.learning_rate,
            discount=self.discount,
            entropy_weight=self.entropy_weight,
            value_weight=self.value_weight,
            step_size=self.step_size,
            seed=seed,
        )


@dataclass(frozen=True)
class ExperimentSection:
    """Root seed, output directory and the evaluated testing holes."""

    seed: int = 0
    out: str = "runs/default"
    holes: Tuple[str, ...] = BENCHMARK_HOLES


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete configuration of an experiment run."""

    sim: SimSection = field(default_factory=SimSection)
    grid: GridSection = field(default_factory=GridSection)
    dataset: DatasetSection = field(default_factory=DatasetSection)
    dynamics: DynamicsSection = field(default_factory=DynamicsSection)
    finetune: FinetuneSection = field(default_factory=FinetuneSection)
    mpc: MpcSection = field(default_factory=MpcSection)
    reward: RewardSection = field(default_factory=RewardSection)
    rl: RlSection = field(default_factory=RlSection)
    experiment: ExperimentSection = field(default_factory=ExperimentSection)

    @property
    def seed(self) -> int:
        """Root seed."""
        return self.experiment.seed

    @property
    def out_dir(self) -> Path:
        """Run directory."""
        return Path(self.experiment.out)

    def to_dict(self) -> Dict[str, Dict[str, Any]]:
        """Plain nested mapping with tuples as lists."""
        result: Dict[str, Dict[str, Any]] = {}
        for section in dataclasses.fields(self):
            values = dataclasses.asdict(getattr(self, section.name))
            result[section.name] = {
                key: list(value) if isinstance(value, tuple) else value
                for key, value in values.items()
            }
        return result

    def dump(self) -> str:
        """Canonical YAML text (sorted keys)."""
        return str(yaml.safe_dump(self.to_dict(), sort_keys=True, default_flow_style=False))

    def config_hash(self) -> str:
        """SHA-256 of the canonical YAML text."""
        return hashlib.sha256(self.dump().encode("utf-8")).hexdigest()


def _coerce(value: Any, hint: Any, key: str) -> Any:
    """Check and convert one value against a field annotation."""
    origin = typing.get_origin(hint)
    if origin in (Union, types.UnionType):
        options = [arg for arg in typing.get_args(hint) if arg is not type(None)]
        if value is None:
            return None
        return _coerce(value, options[0], key)
    if origin is tuple:
        item = typing.get_args(hint)[0]
        if isinstance(value, str):
            try:
                value = [yaml.safe_load(part) for part in value.split(",") if part.strip()]
            except yaml.YAMLError as exc:
                raise ConfigError(f"{key} holds an unreadable list item", key=key) from exc
        elif isinstance(value, (int, float)) and not isinstance(value, bool):
            value = [value]
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{key} expects a list, got {value!r}", key=key)
        return tuple(_coerce(v, item, key) for v in value)
    if hint is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{key} expects true or false, got {value!r}", key=key)
        return value
    if hint is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key} expects an integer, got {value!r}", key=key)
        return value
    if hint is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key} expects a number, got {value!r}", key=key)
        return float(value)
    if hint is str:
        if value is None or isinstance(value, (list, dict)):
            raise ConfigError(f"{key} expects a string, got {value!r}", key=key)
        return str(value)
    raise ConfigError(f"Unsupported type for {key}", key=key)


def _build_section(cls: Any, name: str, values: Dict[str, Any]) -> Any:
    hints = typing.get_type_hints(cls)
    known = {f.name for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in values.items():
        dotted = f"{name}.{key}"
        if key not in known:
            raise ConfigError(f"Unknown configuration key: {dotted}", key=dotted)
        kwargs[key] = _coerce(value, hints[key], dotted)
    try:
        return cls(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"Invalid {name} section: {exc}", key=name) from exc


def config_from_dict(data: Optional[Dict[str, Any]]) -> ExperimentConfig:
    """
    Build a configuration from a nested mapping.

    Missing sections and keys keep their defaults.

    Raises:
        ConfigError: On an unknown section or key or a mistyped value
    """
    data = data or {}
    if not isinstance(data, dict):
        raise ConfigError("Configuration must be a mapping of sections")
    sections = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
    hints = typing.get_type_hints(ExperimentConfig)
    kwargs = {}
    for name, values in data.items():
        if name not in sections:
            raise ConfigError(f"Unknown configuration section: {name}", key=str(name))
        if values is None:
            continue
        if not isinstance(values, dict):
            raise ConfigError(f"Section {name} must be a mapping", key=name)
        kwargs[name] = _build_section(hints[name], name, values)
    config = ExperimentConfig(**kwargs)
    _validate(config)
    return config


def _validate(config: ExperimentConfig) -> None:
    checks = [
        (config.grid.n >= 2, "grid.n", "must be at least 2"),
        (min(config.grid.grid_range) > 0, "grid.range_x", "grid range must be positive"),
        (config.dataset.trajectories >= 1, "dataset.trajectories", "must be at least 1"),
        (config.dataset.steps >= 1, "dataset.steps", "must be at least 1"),
        (config.dataset.held_out >= 1, "dataset.held_out", "must be at least 1"),
        (config.dynamics.episodes >= 0, "dynamics.episodes", "must be non-negative"),
        (config.finetune.episodes >= 0, "finetune.episodes", "must be non-negative"),
        (config.mpc.trials >= 1, "mpc.trials", "must be at least 1"),
        (config.rl.trials >= 1, "rl.trials", "must be at least 1"),
        (config.rl.episodes >= 0, "rl.episodes", "must be non-negative"),
        (0.0 < config.rl.data_fraction <= 1.0, "rl.data_fraction", "must be in (0, 1]"),
        (0.0 <= config.rl.target_success <= 1.0, "rl.target_success", "must be in [0, 1]"),
    ]
    for fractions, key in (
        (config.finetune.fractions, "finetune.fractions"),
        (config.mpc.data_fractions, "mpc.data_fractions"),
    ):
        checks.append((all(0.0 < f <= 1.0 for f in fractions), key, "must lie in (0, 1]"))
    for ok, key, message in checks:
        if not ok:
            raise ConfigError(f"{key} {message}", key=key)
    for maker in (config.mpc.plan_config, config.sim.noise):
        try:
            maker()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def parse_override(expression: str) -> Tuple[str, str, Any]:
    """
    Split ``section.key=value``; the value is typed as a YAML scalar.

    Raises:
        ConfigError: If the expression is malformed
    """
    target, sep, raw = expression.partition("=")
    section, dot, key = target.strip().partition(".")
    if not sep or not dot or not section or not key:
        raise ConfigError(
            f"Override must look like section.key=value, got {expression!r}", key=target
        )
    try:
        value = yaml.safe_load(raw) if raw.strip() else None
    except yaml.YAMLError as exc:
        raise ConfigError(f"Cannot parse value in {expression!r}: {exc}", key=target) from exc
    return section, key, value


def apply_overrides(data: Dict[str, Any], overrides: Iterable[str]) -> Dict[str, Any]:
    """Return a copy of a nested mapping with ``--set`` overrides applied."""
    merged: Dict[str, Any] = {
        name: dict(values or {}) if isinstance(values, dict) or values is None else values
        for name, values in data.items()
    }
    for expression in overrides:
        section, key, value = parse_override(expression)
        target = merged.setdefault(section, {})
        if not isinstance(target, dict):
            raise ConfigError(f"Section {section} must be a mapping", key=section)
        target[key] = value
    return merged


def load_config(
    path: Optional[PathLike] = None,
    overrides: Iterable[str] = (),
    seed: Optional[int] = None,
    out: Optional[PathLike] = None,
) -> ExperimentConfig:
    """
    Load a configuration file (or the defaults) and apply overrides.

    ``seed`` and ``out`` take precedence over the file and ``--set`` values.

    Raises:
        ConfigError: If the file is not valid YAML or holds invalid settings
        FileNotFoundError: If ``path`` does not exist
    """
    data: Dict[str, Any] = {}
    if path is not None:
        config_path = Path(path)
        if not config_path.exists():
            raise FileNotFoundError(f"Config file not found: {config_path}")
        try:
            data = yaml.safe_load(config_path.read_text(encoding="utf-8")) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"Invalid YAML in {config_path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{config_path} must hold a mapping of sections")

    extra = list(overrides)
    if seed is not None:
        extra.append(f"experiment.seed={int(seed)}")
    merged = apply_overrides(data, extra)
    if out is not None:
        merged.setdefault("experiment", {})["out"] = str(out)
    config = config_from_dict(merged)
    logger.debug("Loaded configuration %s", config.config_hash()[:12])
    return config


def save_config(config: ExperimentConfig, path: PathLike) -> None:
    """Write the canonical YAML text."""
    Path(path).write_text(config.dump(), encoding="utf-8")
