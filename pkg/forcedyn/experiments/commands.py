"""
Experiment commands.

Each command reads its inputs from and writes its outputs to one run
directory, records them in a manifest and derives every seed from the root
seed and a purpose tag. Layout of a run directory::

    config.yaml, manifest.yaml, manifests/<command>.yaml
    data/<hole>.grid.csv            probed grids
    data/<hole>.traj.csv            training trajectories
    data/<hole>.heldout.traj.csv    held-out evaluation trajectories
    force_patterns.csv
    models/pretrained.xml, loss_curve.csv
    models/<hole>__f<pct>.xml, transfer_curve.csv
    eval.csv
    success.csv, distance_curve.csv
    models/policy__<hole>__f<pct>.xml, rl_curve.csv
    online_baseline.csv
"""

# pylint: disable=too-many-locals
import logging
from dataclasses import dataclass
from functools import partial
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..control.mpc import (
    CEMPlanner,
    Planner,
    RandomPlanner,
    TrialResult,
    planner_chooser,
    run_trials,
    success_rate,
)
from ..core.constants import POSE_COUNT
from ..core.seeding import SeedTag, derive_seed
from ..data.grid import GridTable, load_grid, sample_grid, save_grid, subsample_grid
from ..data.io import load_dataset, save_dataset
from ..data.trajectories import Trajectory, generate_trajectories
from ..dynamics.evaluation import eval_error
from ..dynamics.model import DynamicsConfig, DynamicsModel, init_model
from ..dynamics.oracle import GridOracleDynamics
from ..dynamics.serialization import load_model, save_model
from ..dynamics.training import TrainReport, finetune, train
from ..geometry.catalog import catalog, find_hole
from ..geometry.shapes import HoleSpec
from ..rl.a2c import train_offline
from ..rl.evaluation import eval_policy
from ..rl.online import train_online
from ..rl.policy import init_policy, load_policy, save_policy
from ..rl.reward import sigma_from_grid
from ..sim.contact import ContactSimulator, SensorNoise, goal_state
from .config import ExperimentConfig, save_config
from .manifest import ManifestRecorder, RunManifest
from .report import (
    DISTANCE_CURVE,
    EVAL,
    FORCE_PATTERNS,
    LOSS_CURVE,
    ONLINE_BASELINE,
    RL_CURVE,
    SUCCESS,
    TRANSFER_CURVE,
    RunReport,
    TableSchema,
    aggregate_runs,
    merge_table,
    write_table,
)

logger = logging.getLogger(__name__)

RETURN_WINDOW = 200
RANDOM_CONTROLLER = "random"
MPC_CONTROLLER = "mpc"
ORACLE_CONTROLLER = "mpc-oracle"
RL_CONTROLLER = "rl"


def fraction_label(fraction: float) -> str:
    """File tag of a data fraction, e.g. ``f020`` for 0.2."""
    return f"f{int(round(fraction * 100)):03d}"


@dataclass
class RunContext:
    """
    One command invocation against a run directory.

    Attributes:
        config: Effective configuration
        command: Subcommand name
        root: Run directory
        recorder: Collects inputs and outputs for the manifest
    """

    config: ExperimentConfig
    command: str
    root: Path
    recorder: ManifestRecorder

    @classmethod
    def open(cls, config: ExperimentConfig, command: str) -> "RunContext":
        """Create the run directory and write the effective configuration."""
        root = config.out_dir
        for sub in ("", "data", "models"):
            (root / sub).mkdir(parents=True, exist_ok=True)
        recorder = ManifestRecorder(root, command, config.config_hash(), config.seed)
        save_config(config, root / "config.yaml")
        recorder.wrote(root / "config.yaml")
        logger.info("Running %s in %s", command, root)
        return cls(config, command, root, recorder)

    def seed(self, *tags: SeedTag) -> int:
        """Child seed for a purpose."""
        return derive_seed(self.config.seed, *tags)

    def path(self, *parts: str) -> Path:
        """Path inside the run directory."""
        return self.root.joinpath(*parts)

    def require(self, path: Path, producer: str) -> Path:
        """
        Record an input file.

        Raises:
            FileNotFoundError: If the file is missing, naming the command that writes it
        """
        if not path.exists():
            raise FileNotFoundError(f"{path} not found; run 'forcedyn {producer}' first")
        return self.recorder.read(path)

    def write_table(
        self, name: str, schema: TableSchema, rows: Sequence[Mapping[str, object]]
    ) -> Path:
        """Write a result table owned by this command."""
        return self.recorder.wrote(write_table(self.path(name), schema, rows))

    def merge_table(
        self,
        schema: TableSchema,
        rows: Sequence[Mapping[str, object]],
        owns: Callable[[Dict[str, str]], bool],
    ) -> Path:
        """Replace this command's rows in a shared result table."""
        return self.recorder.wrote(merge_table(self.path(schema.name), schema, rows, owns))

    def finish(self) -> RunManifest:
        """Write the manifest."""
        return self.recorder.write()

    # Shared lookups

    def training_specs(self) -> List[HoleSpec]:
        """Training holes, all of the catalog unless ``dataset.training_holes`` names some."""
        specs = catalog(
            "training", self.config.sim.clearance_jitter, self.seed("catalog", "training")
        )
        wanted = self.config.dataset.training_holes
        if not wanted:
            return specs
        return [find_hole(hole_id, specs) for hole_id in wanted]

    def testing_specs(self) -> List[HoleSpec]:
        """Evaluated testing holes in configuration order."""
        specs = catalog(
            "testing", self.config.sim.clearance_jitter, self.seed("catalog", "testing")
        )
        return [find_hole(hole_id, specs) for hole_id in self.config.experiment.holes]

    def simulator(self, spec: HoleSpec, noisy: bool = True) -> ContactSimulator:
        """Simulator of a hole, with the configured sensor noise unless ``noisy`` is False."""
        sim = self.config.sim
        return ContactSimulator(
            spec,
            f_max=sim.f_max,
            noise=sim.noise() if noisy else SensorNoise.off(),
            resolution=sim.resolution,
        )

    def goal(self, spec: HoleSpec) -> np.ndarray:
        """Noise-free goal state values of a hole."""
        return goal_state(spec, self.config.sim.f_max).values

    def action_std(self) -> Optional[Tuple[float, float]]:
        """Configured trajectory action std, or None for the grid default."""
        std = self.config.dataset.action_std
        return None if std is None else (std, std)

    def load_grid(self, hole_id: str) -> GridTable:
        """Probed grid of a hole."""
        return load_grid(self.require(self.path("data", f"{hole_id}.grid.csv"), "gen-data"))

    def fraction_grid(self, grid: GridTable, fraction: float) -> GridTable:
        """The data-fraction subset of a full grid, identical across commands."""
        if fraction >= 1.0:
            return grid
        seed = self.seed("fraction", grid.hole_id, fraction_label(fraction))
        return subsample_grid(grid, fraction, seed)

    def held_out(self, hole_id: str) -> List[Trajectory]:
        """Held-out evaluation trajectories of a testing hole."""
        path = self.path("data", f"{hole_id}.heldout.traj.csv")
        return load_dataset(self.require(path, "gen-data"), hole_id)

    def model_path(self, hole_id: str, fraction: float) -> Path:
        """File of the dynamics model finetuned on a data fraction."""
        return self.path("models", f"{hole_id}__{fraction_label(fraction)}.xml")

    def load_finetuned(self, hole_id: str, fraction: float) -> DynamicsModel:
        """Dynamics model finetuned on a data fraction."""
        return load_model(self.require(self.model_path(hole_id, fraction), "finetune"))

    def policy_path(self, hole_id: str, fraction: float) -> Path:
        """File of the policy trained against a data fraction's model."""
        return self.path("models", f"policy__{hole_id}__{fraction_label(fraction)}.xml")


def _force_pattern_rows(grid: GridTable) -> List[Dict[str, object]]:
    """Per-pose readings along the lattice row closest to y = 0."""
    ys = grid.positions[:: grid.n, 1]
    row = int(np.argmin(np.abs(ys)))
    rows: List[Dict[str, object]] = []
    for col in range(grid.n):
        index = row * grid.n + col
        if not grid.mask[index]:
            continue
        state = grid.state(index)
        px, py = (float(v) for v in grid.positions[index])
        for pose in range(POSE_COUNT):
            fx, fy, fz, tx, ty, tz = state.reading(pose).as_tuple()
            rows.append(
                {
                    "hole": grid.hole_id,
                    "px": px,
                    "py": py,
                    "pose": pose,
                    "fx": fx,
                    "fy": fy,
                    "fz": fz,
                    "tx": tx,
                    "ty": ty,
                    "tz": tz,
                }
            )
    return rows


def cmd_gen_data(config: ExperimentConfig) -> RunManifest:
    """
    Probe grids and synthesize trajectories.

    Training holes get a full grid and training trajectories; testing holes
    get a full grid (data fractions are subsets of it) and held-out
    trajectories for the error metric.
    """
    ctx = RunContext.open(config, "gen-data")
    grid_cfg, data_cfg = config.grid, config.dataset
    patterns: List[Dict[str, object]] = []

    def probe(spec: HoleSpec) -> GridTable:
        grid = sample_grid(
            spec,
            n=grid_cfg.n,
            grid_range=grid_cfg.grid_range,
            simulator=ctx.simulator(spec, noisy=False),
        )
        save_grid(grid, ctx.recorder.wrote(ctx.path("data", f"{spec.hole_id}.grid.csv")))
        patterns.extend(_force_pattern_rows(grid))
        return grid

    for spec in ctx.training_specs():
        grid = probe(spec)
        trajectories = generate_trajectories(
            grid,
            data_cfg.trajectories,
            data_cfg.steps,
            ctx.action_std(),
            seed=ctx.seed("trajectories", spec.hole_id),
        )
        save_dataset(trajectories, ctx.recorder.wrote(ctx.path("data", f"{spec.hole_id}.traj.csv")))

    for spec in ctx.testing_specs():
        grid = probe(spec)
        held_out = generate_trajectories(
            grid,
            data_cfg.held_out,
            data_cfg.steps,
            ctx.action_std(),
            seed=ctx.seed("held_out", spec.hole_id),
        )
        path = ctx.path("data", f"{spec.hole_id}.heldout.traj.csv")
        save_dataset(held_out, ctx.recorder.wrote(path))

    ctx.write_table(FORCE_PATTERNS.name, FORCE_PATTERNS, patterns)
    return ctx.finish()


def cmd_train_dynamics(config: ExperimentConfig) -> RunManifest:
    """Pretrain the transition model on every training hole's trajectories."""
    ctx = RunContext.open(config, "train-dynamics")
    dyn = config.dynamics
    trajectories: List[Trajectory] = []
    for spec in ctx.training_specs():
        path = ctx.require(ctx.path("data", f"{spec.hole_id}.traj.csv"), "gen-data")
        trajectories.extend(load_dataset(path))

    model = init_model(
        DynamicsConfig(dyn.hidden_size, dyn.learning_rate, ctx.seed("dynamics", "init"))
    )
    report = train(
        model,
        trajectories,
        dyn.episodes,
        trajs_per_episode=dyn.trajs_per_episode,
        seed=ctx.seed("dynamics", "train"),
        log_every=dyn.log_every,
    )
    save_model(model, ctx.recorder.wrote(ctx.path("models", "pretrained.xml")))
    rows = [{"episode": i, "loss": loss} for i, loss in enumerate(report.losses, start=1)]
    ctx.write_table(LOSS_CURVE.name, LOSS_CURVE, rows)
    return ctx.finish()


def _checkpoint_rows(
    hole_id: str, init: str, fraction: float, report: TrainReport
) -> List[Dict[str, object]]:
    return [
        {"hole": hole_id, "init": init, "data_fraction": fraction, "episode": episode, "err": err}
        for episode, err in report.checkpoints
    ]


def cmd_finetune(config: ExperimentConfig) -> RunManifest:
    """
    Finetune the pretrained model on each data fraction of each testing hole.

    With ``finetune.scratch`` a freshly initialized model is trained on the
    same data for the transfer curve; only the finetuned models are saved.
    """
    ctx = RunContext.open(config, "finetune")
    dyn, fine = config.dynamics, config.finetune
    pretrained = load_model(ctx.require(ctx.path("models", "pretrained.xml"), "train-dynamics"))
    curve: List[Dict[str, object]] = []

    for spec in ctx.testing_specs():
        hole_id = spec.hole_id
        grid = ctx.load_grid(hole_id)
        evaluate = partial(eval_error, trajectories=ctx.held_out(hole_id))
        for fraction in fine.fractions:
            label = fraction_label(fraction)
            subset = ctx.fraction_grid(grid, fraction)
            trajectories = generate_trajectories(
                subset,
                fine.trajectories,
                config.dataset.steps,
                ctx.action_std(),
                seed=ctx.seed("finetune-data", hole_id, label),
            )
            model = pretrained.copy()
            report = finetune(
                model,
                trajectories,
                fine.episodes,
                trajs_per_episode=dyn.trajs_per_episode,
                seed=ctx.seed("finetune", hole_id, label),
                learning_rate=fine.learning_rate,
                eval_fn=evaluate,
                eval_every=fine.eval_every,
                log_every=dyn.log_every,
            )
            save_model(model, ctx.recorder.wrote(ctx.model_path(hole_id, fraction)))
            curve.extend(_checkpoint_rows(hole_id, "pretrained", fraction, report))

            if fine.scratch:
                scratch = init_model(
                    DynamicsConfig(dyn.hidden_size, dyn.learning_rate, ctx.seed("dynamics", "init"))
                )
                report = train(
                    scratch,
                    trajectories,
                    fine.episodes,
                    trajs_per_episode=dyn.trajs_per_episode,
                    seed=ctx.seed("finetune", hole_id, label),
                    eval_fn=evaluate,
                    eval_every=fine.eval_every,
                    log_every=dyn.log_every,
                )
                curve.extend(_checkpoint_rows(hole_id, "scratch", fraction, report))

    ctx.write_table(TRANSFER_CURVE.name, TRANSFER_CURVE, curve)
    return ctx.finish()


def cmd_eval_dynamics(config: ExperimentConfig) -> RunManifest:
    """Held-out error of every finetuned model."""
    ctx = RunContext.open(config, "eval-dynamics")
    rows: List[Dict[str, object]] = []
    for spec in ctx.testing_specs():
        held_out = ctx.held_out(spec.hole_id)
        for fraction in config.finetune.fractions:
            model = ctx.load_finetuned(spec.hole_id, fraction)
            err = eval_error(model, held_out)
            logger.info("%s at %s: error %.6f", spec.hole_id, fraction_label(fraction), err)
            rows.append({"hole": spec.hole_id, "data_fraction": fraction, "err": err})
    ctx.write_table(EVAL.name, EVAL, rows)
    return ctx.finish()


def _trial_rows(
    hole_id: str, controller: str, fraction: float, results: Sequence[TrialResult], max_steps: int
) -> Tuple[Dict[str, object], List[Dict[str, object]]]:
    summary: Dict[str, object] = {
        "hole": hole_id,
        "controller": controller,
        "data_fraction": fraction,
        "success_rate": success_rate(results),
        "mean_steps": float(np.mean([r.steps_taken for r in results])),
        "trials": len(results),
    }
    curve: List[Dict[str, object]] = [
        {
            "hole": hole_id,
            "controller": controller,
            "data_fraction": fraction,
            "step": step,
            "mean_distance": float(np.mean([r.distance_at(step) for r in results])),
        }
        for step in range(max_steps + 1)
    ]
    logger.info(
        "%s %s at %s: success %.3f",
        hole_id,
        controller,
        fraction_label(fraction),
        summary["success_rate"],
    )
    return summary, curve


def _trial_owner(row: Mapping[str, object], by_fraction: bool) -> Tuple[str, ...]:
    owner: Tuple[str, ...] = (str(row["controller"]), str(row["hole"]))
    if by_fraction:
        owner += (fraction_label(float(str(row["data_fraction"]))),)
    return owner


def _merge_trials(
    ctx: RunContext,
    summaries: Sequence[Mapping[str, object]],
    curves: Sequence[Mapping[str, object]],
    by_fraction: bool = False,
) -> None:
    """
    Merge trial rows into the shared tables.

    Existing rows of every (controller, hole) pair in ``summaries`` are
    replaced; with ``by_fraction`` only those of the same data fraction.
    """
    owned = {_trial_owner(row, by_fraction) for row in summaries}

    def owns(row: Dict[str, str]) -> bool:
        return _trial_owner(row, by_fraction) in owned

    ctx.merge_table(SUCCESS, summaries, owns)
    ctx.merge_table(DISTANCE_CURVE, curves, owns)


def cmd_run_mpc(config: ExperimentConfig) -> RunManifest:
    """
    Benchmark the planner with each configured data fraction's model, plus
    the random and grid-oracle baselines when enabled.

    Every controller on a hole faces the same start offsets. With
    ``mpc.oracle_training_holes`` the grid-oracle planner also runs on every
    training hole, which checks the planner apart from any learned model.
    """
    ctx = RunContext.open(config, "run-mpc")
    mpc = config.mpc
    plan_cfg = mpc.plan_config()
    summaries: List[Dict[str, object]] = []
    curves: List[Dict[str, object]] = []

    def benchmark(spec: HoleSpec, planner: Planner, controller: str, fraction: float) -> None:
        goal = ctx.goal(spec)
        results = run_trials(
            ctx.simulator(spec),
            planner_chooser(planner, goal),
            goal,
            mpc.trials,
            seed=ctx.seed("trials", spec.hole_id),
            max_steps=mpc.max_steps,
            success_radius=mpc.success_radius,
            grid_range=config.grid.grid_range,
            alpha=plan_cfg.alpha,
            beta=plan_cfg.beta,
        )
        summary, curve = _trial_rows(spec.hole_id, controller, fraction, results, mpc.max_steps)
        summaries.append(summary)
        curves.extend(curve)

    def benchmark_oracle(spec: HoleSpec) -> None:
        oracle = GridOracleDynamics(ctx.load_grid(spec.hole_id))
        benchmark(spec, CEMPlanner(oracle, plan_cfg), ORACLE_CONTROLLER, 1.0)

    for spec in ctx.testing_specs():
        for fraction in mpc.data_fractions:
            model = ctx.load_finetuned(spec.hole_id, fraction)
            benchmark(spec, CEMPlanner(model, plan_cfg), MPC_CONTROLLER, fraction)
        if mpc.random_baseline:
            benchmark(spec, RandomPlanner(plan_cfg), RANDOM_CONTROLLER, 0.0)
        if mpc.oracle_baseline:
            benchmark_oracle(spec)

    if mpc.oracle_training_holes:
        for spec in ctx.training_specs():
            benchmark_oracle(spec)

    _merge_trials(ctx, summaries, curves)
    return ctx.finish()


def cmd_train_rl(config: ExperimentConfig) -> RunManifest:
    """
    Train a policy per testing hole against its finetuned dynamics model.

    Starts come from the same data-fraction grid the model was finetuned on;
    the simulator is never probed. Policies and curve rows are tagged with
    ``rl.data_fraction``, so runs at several fractions share a directory.
    """
    ctx = RunContext.open(config, "train-rl")
    rl = config.rl
    curve: List[Dict[str, object]] = []
    for spec in ctx.testing_specs():
        hole_id = spec.hole_id
        dynamics = ctx.load_finetuned(hole_id, rl.data_fraction)
        grid = ctx.fraction_grid(ctx.load_grid(hole_id), rl.data_fraction)
        goal = goal_state(spec, config.sim.f_max)
        reward_cfg = config.reward.reward_config(
            sigma_from_grid(grid, goal, dynamics.norm_stats)
        )
        policy = init_policy(
            rl.policy_config(ctx.seed("rl", "init", hole_id)),
            dynamics.norm_stats,
            reward_cfg.sigma,
        )
        report = train_offline(
            policy,
            dynamics,
            grid,
            rl.episodes,
            goal,
            reward_cfg,
            horizon=rl.horizon,
            seed=ctx.seed("rl", "train", hole_id),
            log_every=rl.log_every,
        )
        save_policy(policy, ctx.recorder.wrote(ctx.policy_path(hole_id, rl.data_fraction)))
        curve.extend(
            {
                "hole": hole_id,
                "data_fraction": rl.data_fraction,
                "episode": episode,
                "return": value,
                "trailing_mean": report.trailing_mean_return(RETURN_WINDOW, end=episode),
            }
            for episode, value in enumerate(report.returns, start=1)
        )

    holes = set(config.experiment.holes)
    label = fraction_label(rl.data_fraction)

    def owns(row: Dict[str, str]) -> bool:
        return row["hole"] in holes and fraction_label(float(row["data_fraction"])) == label

    ctx.merge_table(RL_CURVE, curve, owns)
    return ctx.finish()


def cmd_eval_policy(config: ExperimentConfig) -> RunManifest:
    """Benchmark each hole's greedy policy on the trial starts of ``run-mpc``."""
    ctx = RunContext.open(config, "eval-policy")
    mpc, rl = config.mpc, config.rl
    summaries: List[Dict[str, object]] = []
    curves: List[Dict[str, object]] = []
    for spec in ctx.testing_specs():
        path = ctx.require(ctx.policy_path(spec.hole_id, rl.data_fraction), "train-rl")
        evaluation = eval_policy(
            ctx.simulator(spec),
            load_policy(path),
            goal_state(spec, config.sim.f_max),
            rl.trials,
            max_steps=mpc.max_steps,
            success_radius=mpc.success_radius,
            seed=ctx.seed("trials", spec.hole_id),
            grid_range=config.grid.grid_range,
        )
        summary, curve = _trial_rows(
            spec.hole_id, RL_CONTROLLER, rl.data_fraction, evaluation.trials, mpc.max_steps
        )
        summaries.append(summary)
        curves.extend(curve)
    _merge_trials(ctx, summaries, curves, by_fraction=True)
    return ctx.finish()


def cmd_online_baseline(config: ExperimentConfig) -> RunManifest:
    """
    Train policies directly on the simulator and count the probes needed to
    reach ``rl.target_success``, next to the grid probes of the offline route.
    """
    ctx = RunContext.open(config, "online-baseline")
    rl, mpc = config.rl, config.mpc
    pretrained = load_model(ctx.require(ctx.path("models", "pretrained.xml"), "train-dynamics"))
    rows: List[Dict[str, object]] = []
    for spec in ctx.testing_specs():
        hole_id = spec.hole_id
        grid = ctx.fraction_grid(ctx.load_grid(hole_id), rl.data_fraction)
        goal = goal_state(spec, config.sim.f_max)
        reward_cfg = config.reward.reward_config(
            sigma_from_grid(grid, goal, pretrained.norm_stats)
        )
        policy = init_policy(
            rl.policy_config(ctx.seed("online", "init", hole_id)),
            pretrained.norm_stats,
            reward_cfg.sigma,
        )
        report = train_online(
            policy,
            ctx.simulator(spec),
            goal,
            rl.online_episodes,
            reward_cfg,
            horizon=rl.horizon,
            seed=ctx.seed("online", hole_id),
            eval_every=rl.online_eval_every,
            eval_trials=rl.online_eval_trials,
            target_success=rl.target_success,
            max_steps=mpc.max_steps,
            success_radius=mpc.success_radius,
            grid_range=config.grid.grid_range,
        )
        final = report.success_history[-1][1] if report.success_history else float("nan")
        rows.append(
            {
                "hole": hole_id,
                "episodes": report.episodes_run,
                "training_probes": report.training_probes,
                "evaluation_probes": report.evaluation_probes,
                "offline_probes": grid.probe_total,
                "reached": report.reached,
                "final_success": final,
            }
        )
    ctx.write_table(ONLINE_BASELINE.name, ONLINE_BASELINE, rows)
    return ctx.finish()


def cmd_report(run_dirs: Sequence[str], out: Optional[str] = None) -> RunReport:
    """
    Aggregate result tables across run directories.

    Writes the summaries into ``out`` when given; the caller prints them
    otherwise.
    """
    report = aggregate_runs(run_dirs)
    if out is not None:
        report.write(out)
    return report


COMMANDS: Dict[str, Callable[[ExperimentConfig], RunManifest]] = {
    "gen-data": cmd_gen_data,
    "train-dynamics": cmd_train_dynamics,
    "finetune": cmd_finetune,
    "eval-dynamics": cmd_eval_dynamics,
    "run-mpc": cmd_run_mpc,
    "train-rl": cmd_train_rl,
    "eval-policy": cmd_eval_policy,
    "online-baseline": cmd_online_baseline,
}
