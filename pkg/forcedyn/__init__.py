"""
forcedyn - learned force-torque dynamics for peg-in-hole insertion.

This package simulates multi-pose force-torque probing of rigid and
deformable holes, learns a recurrent transition model of the 30-d force
state from offline grid data, and aligns the peg either with a
cross-entropy model predictive controller or with a policy trained purely
against the learned model.
"""

try:
    from ._version import version as __version__
except ImportError:
    __version__ = "unknown"

from .control.mpc import CEMPlanner, PlanConfig, RandomPlanner, cem_plan, run_mpc_episode
from .core.exceptions import (
    ConfigError,
    DatasetFormatError,
    DivergenceError,
    EmptyFootprintError,
    ForceDynError,
    HoleSpecError,
    ModelFormatError,
    ModelVersionError,
    NonMonotoneFieldError,
    ReportSchemaError,
)
from .data.grid import GridTable, sample_grid
from .data.trajectories import Trajectory, generate_trajectories
from .dynamics.model import DynamicsModel, init_model
from .dynamics.training import finetune, train
from .geometry.catalog import catalog
from .geometry.shapes import HoleSpec, ShapeKind
from .rl.a2c import train_offline
from .rl.evaluation import eval_policy
from .rl.policy import PolicyModel, init_policy
from .sim.contact import ContactSimulator, probe_multipose
from .sim.state import ForceState, ForceTorque

__all__ = [
    "__version__",
    "ForceDynError",
    "HoleSpecError",
    "EmptyFootprintError",
    "NonMonotoneFieldError",
    "DivergenceError",
    "DatasetFormatError",
    "ModelFormatError",
    "ModelVersionError",
    "ConfigError",
    "ReportSchemaError",
    "ShapeKind",
    "HoleSpec",
    "catalog",
    "ForceTorque",
    "ForceState",
    "ContactSimulator",
    "probe_multipose",
    "GridTable",
    "sample_grid",
    "Trajectory",
    "generate_trajectories",
    "DynamicsModel",
    "init_model",
    "train",
    "finetune",
    "PlanConfig",
    "CEMPlanner",
    "RandomPlanner",
    "cem_plan",
    "run_mpc_episode",
    "PolicyModel",
    "init_policy",
    "train_offline",
    "eval_policy",
]
