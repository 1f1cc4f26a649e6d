"""
Result tables and their aggregation across runs.

Commands write plain CSV tables with a header row. Tables shared by several
commands (``success.csv``, ``distance_curve.csv``) are merged: a command
replaces the rows it owns and the file is rewritten sorted by its key
columns, so reruns leave identical bytes.

``aggregate_runs`` reads the tables of several run directories (usually one
per seed) and reduces them to mean and sample standard deviation per group.
"""

import csv
import io
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Mapping, Sequence, Tuple, Union

import numpy as np

from ..core.exceptions import ReportSchemaError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
Row = Dict[str, str]


@dataclass(frozen=True)
class TableSchema:
    """
    Columns of a result table.

    Attributes:
        name: File name inside the run directory
        columns: Header in order
        key: Columns that identify a row, also the sort order
        numeric_key: Key columns sorted as numbers
    """

    name: str
    columns: Tuple[str, ...]
    key: Tuple[str, ...]
    numeric_key: Tuple[str, ...] = ()

    def sort_key(self, row: Mapping[str, str]) -> Tuple[object, ...]:
        """Ordering of a row by its key columns."""
        return tuple(
            float(row[col]) if col in self.numeric_key else row[col] for col in self.key
        )


SUCCESS = TableSchema(
    "success.csv",
    ("hole", "controller", "data_fraction", "success_rate", "mean_steps", "trials"),
    ("hole", "controller", "data_fraction"),
    ("data_fraction",),
)
DISTANCE_CURVE = TableSchema(
    "distance_curve.csv",
    ("hole", "controller", "data_fraction", "step", "mean_distance"),
    ("hole", "controller", "data_fraction", "step"),
    ("data_fraction", "step"),
)
EVAL = TableSchema(
    "eval.csv", ("hole", "data_fraction", "err"), ("hole", "data_fraction"), ("data_fraction",)
)
LOSS_CURVE = TableSchema("loss_curve.csv", ("episode", "loss"), ("episode",), ("episode",))
TRANSFER_CURVE = TableSchema(
    "transfer_curve.csv",
    ("hole", "init", "data_fraction", "episode", "err"),
    ("hole", "init", "data_fraction", "episode"),
    ("data_fraction", "episode"),
)
RL_CURVE = TableSchema(
    "rl_curve.csv",
    ("hole", "data_fraction", "episode", "return", "trailing_mean"),
    ("hole", "data_fraction", "episode"),
    ("data_fraction", "episode"),
)
ONLINE_BASELINE = TableSchema(
    "online_baseline.csv",
    (
        "hole",
        "episodes",
        "training_probes",
        "evaluation_probes",
        "offline_probes",
        "reached",
        "final_success",
    ),
    ("hole",),
)
FORCE_PATTERNS = TableSchema(
    "force_patterns.csv",
    ("hole", "px", "py", "pose", "fx", "fy", "fz", "tx", "ty", "tz"),
    ("hole", "px", "py", "pose"),
    ("px", "py", "pose"),
)
SUCCESS_SUMMARY = TableSchema(
    "success_summary.csv",
    ("hole", "controller", "data_fraction", "n", "success_mean", "success_std", "steps_mean"),
    ("hole", "controller", "data_fraction"),
    ("data_fraction",),
)
EVAL_SUMMARY = TableSchema(
    "eval_summary.csv",
    ("hole", "data_fraction", "n", "err_mean", "err_std"),
    ("hole", "data_fraction"),
    ("data_fraction",),
)


def format_value(value: object) -> str:
    """Text of a cell: floats with ``repr`` so values round-trip exactly."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def render_table(schema: TableSchema, rows: Iterable[Mapping[str, object]]) -> str:
    """CSV text of rows, sorted by the schema key."""
    text_rows = [{col: format_value(row[col]) for col in schema.columns} for row in rows]
    text_rows.sort(key=schema.sort_key)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(schema.columns)
    for row in text_rows:
        writer.writerow([row[col] for col in schema.columns])
    return buffer.getvalue()


def write_table(
    path: PathLike, schema: TableSchema, rows: Iterable[Mapping[str, object]]
) -> Path:
    """Write rows as a sorted CSV table."""
    target = Path(path)
    target.write_text(render_table(schema, rows), encoding="utf-8")
    return target


def read_table(path: PathLike, schema: TableSchema) -> List[Row]:
    """
    Read a table and check its header.

    Raises:
        FileNotFoundError: If the file does not exist
        ReportSchemaError: If the header differs from the schema or a row is short
    """
    source = str(path)
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or tuple(header) != schema.columns:
            raise ReportSchemaError(
                f"Expected columns {list(schema.columns)}, got {header}", path=source
            )
        rows = []
        for number, values in enumerate(reader, start=2):
            if not values:
                continue
            if len(values) != len(schema.columns):
                raise ReportSchemaError(
                    f"Line {number} has {len(values)} fields, expected {len(schema.columns)}",
                    path=source,
                )
            rows.append(dict(zip(schema.columns, values)))
    return rows


def merge_table(
    path: PathLike,
    schema: TableSchema,
    rows: Iterable[Mapping[str, object]],
    owns: Callable[[Row], bool],
) -> Path:
    """
    Replace the rows a command owns in a shared table.

    Existing rows for which ``owns`` is true are dropped, the new rows are
    added, and the table is rewritten sorted.
    """
    target = Path(path)
    kept: List[Mapping[str, object]] = []
    if target.exists():
        kept = [row for row in read_table(target, schema) if not owns(row)]
    return write_table(target, schema, [*kept, *rows])


def _mean_std(values: Sequence[float]) -> Tuple[float, float]:
    array = np.asarray(values, dtype=float)
    std = float(np.std(array, ddof=1)) if array.size > 1 else 0.0
    return float(np.mean(array)), std


def _group(rows: Iterable[Row], key: Sequence[str]) -> Dict[Tuple[str, ...], List[Row]]:
    groups: Dict[Tuple[str, ...], List[Row]] = {}
    for row in rows:
        groups.setdefault(tuple(row[col] for col in key), []).append(row)
    return groups


def summarize_success(rows: Iterable[Row]) -> List[Dict[str, object]]:
    """Mean and sample std of the success rate per (hole, controller, data_fraction)."""
    summary: List[Dict[str, object]] = []
    for (hole, controller, fraction), group in _group(rows, SUCCESS.key).items():
        mean, std = _mean_std([float(row["success_rate"]) for row in group])
        steps, _ = _mean_std([float(row["mean_steps"]) for row in group])
        summary.append(
            {
                "hole": hole,
                "controller": controller,
                "data_fraction": fraction,
                "n": len(group),
                "success_mean": mean,
                "success_std": std,
                "steps_mean": steps,
            }
        )
    return summary


def summarize_eval(rows: Iterable[Row]) -> List[Dict[str, object]]:
    """Mean and sample std of the dynamics error per (hole, data_fraction)."""
    summary: List[Dict[str, object]] = []
    for (hole, fraction), group in _group(rows, EVAL.key).items():
        mean, std = _mean_std([float(row["err"]) for row in group])
        summary.append(
            {
                "hole": hole,
                "data_fraction": fraction,
                "n": len(group),
                "err_mean": mean,
                "err_std": std,
            }
        )
    return summary


@dataclass
class RunReport:
    """
    Aggregated tables.

    Attributes:
        success: Rows of the success summary
        evaluation: Rows of the dynamics error summary
        runs: Number of run directories read
    """

    success: List[Dict[str, object]]
    evaluation: List[Dict[str, object]]
    runs: int

    def render(self) -> str:
        """Both summaries as CSV blocks, each preceded by a ``# <file>`` line."""
        blocks = []
        if self.success:
            blocks.append(
                f"# {SUCCESS_SUMMARY.name}\n" + render_table(SUCCESS_SUMMARY, self.success)
            )
        if self.evaluation:
            blocks.append(
                f"# {EVAL_SUMMARY.name}\n" + render_table(EVAL_SUMMARY, self.evaluation)
            )
        return "\n".join(blocks)

    def write(self, out_dir: PathLike) -> List[Path]:
        """Write the non-empty summaries into ``out_dir``."""
        target = Path(out_dir)
        target.mkdir(parents=True, exist_ok=True)
        written = []
        if self.success:
            path = target / SUCCESS_SUMMARY.name
            written.append(write_table(path, SUCCESS_SUMMARY, self.success))
        if self.evaluation:
            path = target / EVAL_SUMMARY.name
            written.append(write_table(path, EVAL_SUMMARY, self.evaluation))
        return written


def aggregate_runs(run_dirs: Sequence[PathLike]) -> RunReport:
    """
    Aggregate ``success.csv`` and ``eval.csv`` across run directories.

    Args:
        run_dirs: Run directories, typically one per seed

    Returns:
        RunReport; a pure function of the table contents

    Raises:
        ReportSchemaError: If no directories are given, none holds a result
            table, or a table has an unexpected header
    """
    if not run_dirs:
        raise ReportSchemaError("No run directories given")
    success_rows: List[Row] = []
    eval_rows: List[Row] = []
    for run_dir in run_dirs:
        root = Path(run_dir)
        if not root.is_dir():
            raise ReportSchemaError(f"Not a run directory: {root}", path=str(root))
        found = False
        for schema, bucket in ((SUCCESS, success_rows), (EVAL, eval_rows)):
            path = root / schema.name
            if path.exists():
                bucket.extend(read_table(path, schema))
                found = True
        if not found:
            logger.warning("No result tables in %s", root)

    if not success_rows and not eval_rows:
        raise ReportSchemaError("None of the run directories holds success.csv or eval.csv")
    logger.info("Aggregated %d runs", len(run_dirs))
    return RunReport(summarize_success(success_rows), summarize_eval(eval_rows), len(run_dirs))
