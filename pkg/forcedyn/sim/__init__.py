"""
Simulation package: force-torque readings, the multi-pose force state and
the synthetic contact simulator.

Examples:
    >>> from forcedyn.geometry import catalog
    >>> from forcedyn.sim import ContactSimulator
    >>> sim = ContactSimulator(catalog("testing")[0])
    >>> sim.goal_state().force_part()
"""

from .contact import (
    ContactField,
    ContactSimulator,
    MultiPoseReading,
    ProbeResult,
    SensorNoise,
    contact_wrench,
    goal_state,
    inserted_signature,
    probe_multipose,
    solve_descent,
)
from .state import POSE_ORDER, ForceState, ForceTorque, Tilt

__all__ = [
    "ForceTorque",
    "Tilt",
    "ForceState",
    "POSE_ORDER",
    "SensorNoise",
    "ProbeResult",
    "MultiPoseReading",
    "ContactField",
    "ContactSimulator",
    "contact_wrench",
    "solve_descent",
    "probe_multipose",
    "goal_state",
    "inserted_signature",
]
