"""
Tests for result tables and cross-run aggregation.
"""

from pathlib import Path

import numpy as np
import pytest

from forcedyn.core.exceptions import ReportSchemaError
from forcedyn.experiments.report import (
    EVAL,
    SUCCESS,
    aggregate_runs,
    format_value,
    merge_table,
    read_table,
    render_table,
    write_table,
)


def success_row(hole: str, controller: str, fraction: float, rate: float) -> dict:
    """One success.csv row."""
    return {
        "hole": hole,
        "controller": controller,
        "data_fraction": fraction,
        "success_rate": rate,
        "mean_steps": 3.0,
        "trials": 10,
    }


def make_run(root: Path, rate: float, err: float) -> Path:
    """Run directory with one success row and one eval row."""
    root.mkdir(parents=True)
    write_table(root / SUCCESS.name, SUCCESS, [success_row("round-15", "mpc", 0.2, rate)])
    write_table(
        root / EVAL.name, EVAL, [{"hole": "round-15", "data_fraction": 0.2, "err": err}]
    )
    return root


class TestTables:
    """Test rendering, reading and merging tables."""

    def test_format_value(self) -> None:
        """Test booleans, floats and integers."""
        assert format_value(True) == "true"
        assert format_value(0.1) == "0.1"
        assert format_value(np.float64(1 / 3)) == repr(1 / 3)
        assert format_value(7) == "7"

    def test_rows_sorted_by_key(self) -> None:
        """Test that fractions sort numerically."""
        text = render_table(
            SUCCESS,
            [
                success_row("round-15", "mpc", 1.0, 0.9),
                success_row("round-15", "mpc", 0.02, 0.1),
                success_row("lshape-15", "random", 0.0, 0.05),
            ],
        )
        lines = text.splitlines()
        assert lines[0] == ",".join(SUCCESS.columns)
        assert [line.split(",")[0:3] for line in lines[1:]] == [
            ["lshape-15", "random", "0.0"],
            ["round-15", "mpc", "0.02"],
            ["round-15", "mpc", "1.0"],
        ]

    def test_read_back(self, tmp_path: Path) -> None:
        """Test that written rows read back as text."""
        rows = [{"hole": "x-1", "data_fraction": 0.2, "err": 1.5}]
        path = write_table(tmp_path / "eval.csv", EVAL, rows)
        assert read_table(path, EVAL) == [{"hole": "x-1", "data_fraction": "0.2", "err": "1.5"}]

    def test_header_mismatch(self, tmp_path: Path) -> None:
        """Test that a foreign header is refused."""
        path = tmp_path / "eval.csv"
        path.write_text("hole,err\nx,1\n")
        with pytest.raises(ReportSchemaError):
            read_table(path, EVAL)

    def test_short_row(self, tmp_path: Path) -> None:
        """Test that a short row is refused."""
        path = tmp_path / "eval.csv"
        path.write_text("hole,data_fraction,err\nx,0.2\n")
        with pytest.raises(ReportSchemaError, match="Line 2"):
            read_table(path, EVAL)

    def test_merge_replaces_owned_rows(self, tmp_path: Path) -> None:
        """Test that a command only replaces its own rows."""
        path = tmp_path / SUCCESS.name
        write_table(
            path,
            SUCCESS,
            [success_row("round-15", "mpc", 0.2, 0.5), success_row("round-15", "rl", 0.2, 0.4)],
        )
        merge_table(
            path,
            SUCCESS,
            [success_row("round-15", "mpc", 0.2, 0.8)],
            owns=lambda row: row["controller"] == "mpc",
        )
        rows = read_table(path, SUCCESS)
        assert [(r["controller"], r["success_rate"]) for r in rows] == [
            ("mpc", "0.8"),
            ("rl", "0.4"),
        ]

    def test_merge_is_idempotent(self, tmp_path: Path) -> None:
        """Test that merging the same rows twice leaves identical bytes."""
        path = tmp_path / SUCCESS.name
        rows = [success_row("round-15", "random", 0.0, 0.1)]
        merge_table(path, SUCCESS, rows, owns=lambda row: row["controller"] == "random")
        before = path.read_bytes()
        merge_table(path, SUCCESS, rows, owns=lambda row: row["controller"] == "random")
        assert path.read_bytes() == before


class TestAggregate:
    """Test aggregation across runs."""

    def test_mean_and_sample_std(self, tmp_path: Path) -> None:
        """Test reduction over three seeds."""
        outcomes = [(0.5, 1.0), (0.7, 2.0), (0.9, 3.0)]
        runs = [
            make_run(tmp_path / f"seed{i}", rate, err) for i, (rate, err) in enumerate(outcomes)
        ]
        report = aggregate_runs(runs)
        assert report.runs == 3
        (success,) = report.success
        assert success["n"] == 3
        assert success["success_mean"] == pytest.approx(0.7)
        assert success["success_std"] == pytest.approx(0.2)
        (evaluation,) = report.evaluation
        assert evaluation["err_mean"] == pytest.approx(2.0)
        assert evaluation["err_std"] == pytest.approx(1.0)

    def test_single_run_has_zero_std(self, tmp_path: Path) -> None:
        """Test that one run reports a zero spread."""
        report = aggregate_runs([make_run(tmp_path / "only", 0.6, 4.0)])
        assert report.success[0]["success_std"] == 0.0

    def test_render_and_write(self, tmp_path: Path) -> None:
        """Test the text blocks and the written summaries."""
        report = aggregate_runs([make_run(tmp_path / "a", 0.6, 4.0)])
        text = report.render()
        assert text.startswith("# success_summary.csv\n")
        assert "# eval_summary.csv\n" in text
        written = report.write(tmp_path / "summary")
        assert [p.name for p in written] == ["success_summary.csv", "eval_summary.csv"]

    def test_pure_function_of_tables(self, tmp_path: Path) -> None:
        """Test that aggregation gives the same text every time."""
        runs = [make_run(tmp_path / "a", 0.6, 4.0), make_run(tmp_path / "b", 0.2, 1.0)]
        assert aggregate_runs(runs).render() == aggregate_runs(list(reversed(runs))).render()

    def test_errors(self, tmp_path: Path) -> None:
        """Test empty input, missing directories and directories without tables."""
        with pytest.raises(ReportSchemaError):
            aggregate_runs([])
        with pytest.raises(ReportSchemaError):
            aggregate_runs([tmp_path / "absent"])
        (tmp_path / "empty").mkdir()
        with pytest.raises(ReportSchemaError):
            aggregate_runs([tmp_path / "empty"])
