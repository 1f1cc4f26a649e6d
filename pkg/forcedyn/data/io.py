"""
Dataset file reading and writing.

Format::

    T=<int> dim=30
    traj_id,step,px,py,ax,ay,f0,...,f29

One line per trajectory step; the action fields of the terminal step
(``step == T``) are empty. Floats are written with ``repr`` so that a
save/load round trip is exact.
"""

import logging
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from ..core.constants import STATE_DIM
from ..core.exceptions import DatasetFormatError
from .trajectories import Trajectory

logger = logging.getLogger(__name__)

_FIELDS = 6 + STATE_DIM


def save_dataset(trajectories: List[Trajectory], path: Union[str, Path]) -> None:
    """
    Write trajectories to a dataset file.

    Raises:
        ValueError: If the trajectories have different lengths
    """
    lengths = {traj.steps for traj in trajectories}
    if len(lengths) > 1:
        raise ValueError(f"Trajectories have different lengths: {sorted(lengths)}")
    steps = lengths.pop() if lengths else 0

    lines = [f"T={steps} dim={STATE_DIM}"]
    for traj_id, traj in enumerate(trajectories):
        for t in range(steps + 1):
            px, py = (repr(float(v)) for v in traj.positions[t])
            if t < steps:
                ax, ay = (repr(float(v)) for v in traj.actions[t])
            else:
                ax, ay = "", ""
            lines.append(f"{traj_id},{t},{px},{py},{ax},{ay}," + traj.state(t).to_line())
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.debug("Wrote %d trajectories to %s", len(trajectories), path)


def _parse_header(line: str, source: str) -> int:
    try:
        fields = dict(item.split("=", 1) for item in line.split())
        steps, dim = int(fields["T"]), int(fields["dim"])
    except (KeyError, ValueError) as exc:
        raise DatasetFormatError(f"Malformed dataset header {line!r}", source, 1) from exc
    if dim != STATE_DIM:
        raise DatasetFormatError(f"Unsupported state dimension {dim}", source, 1)
    if steps < 0:
        raise DatasetFormatError(f"Negative trajectory length {steps}", source, 1)
    return steps


def load_dataset(path: Union[str, Path], hole_id: Optional[str] = None) -> List[Trajectory]:
    """
    Read a dataset file written by ``save_dataset``.

    Args:
        path: Dataset file
        hole_id: Label for the loaded trajectories; defaults to the file
            name up to its first dot

    Raises:
        FileNotFoundError: If the file does not exist
        DatasetFormatError: On a bad header, a malformed row, out-of-order
            steps or a truncated trajectory
    """
    source = str(path)
    label = hole_id if hole_id is not None else Path(path).name.split(".", 1)[0]
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise DatasetFormatError("Empty dataset file", source, 1)
    steps = _parse_header(lines[0], source)

    trajectories: List[Trajectory] = []
    rows: List[List[str]] = []
    number = 1
    for number, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != _FIELDS:
            raise DatasetFormatError(f"Expected {_FIELDS} fields, got {len(parts)}", source, number)
        try:
            traj_id, step = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise DatasetFormatError("Non-integer trajectory index", source, number) from exc
        if traj_id != len(trajectories) or step != len(rows):
            raise DatasetFormatError(
                f"Expected trajectory {len(trajectories)} step {len(rows)}, "
                f"got {traj_id} step {step}",
                source,
                number,
            )
        terminal = step == steps
        if (parts[4] == "" or parts[5] == "") != terminal:
            raise DatasetFormatError(
                "Action fields must be empty exactly on the last step", source, number
            )
        rows.append(parts)
        if terminal:
            trajectories.append(_build(rows, steps, label, source, number))
            rows = []

    if rows:
        raise DatasetFormatError(
            f"Trajectory {len(trajectories)} is truncated after {len(rows)} rows", source, number
        )
    return trajectories


def _build(rows: List[List[str]], steps: int, label: str, source: str, number: int) -> Trajectory:
    try:
        positions = np.array([[float(r[2]), float(r[3])] for r in rows])
        actions = np.array([[float(r[4]), float(r[5])] for r in rows[:-1]]).reshape(steps, 2)
        states = np.array([[float(v) for v in r[6:]] for r in rows])
    except ValueError as exc:
        raise DatasetFormatError("Non-numeric dataset value", source, number) from exc
    return Trajectory(actions=actions, positions=positions, states=states, hole_id=label)
