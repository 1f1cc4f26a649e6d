"""
Control package: cross-entropy model predictive control and the shared
closed-loop episode runner.
"""

from .mpc import (
    CEMPlanner,
    PlanConfig,
    Planner,
    PlanResult,
    RandomPlanner,
    TrialResult,
    cem_plan,
    planner_chooser,
    rollout_cost,
    rollout_costs,
    run_episode,
    run_mpc_episode,
    run_trials,
    sample_start_offset,
    state_cost,
    state_costs,
    success_rate,
)

__all__ = [
    "PlanConfig",
    "PlanResult",
    "Planner",
    "CEMPlanner",
    "RandomPlanner",
    "TrialResult",
    "state_cost",
    "state_costs",
    "rollout_cost",
    "rollout_costs",
    "cem_plan",
    "sample_start_offset",
    "run_episode",
    "planner_chooser",
    "run_mpc_episode",
    "run_trials",
    "success_rate",
]
