"""
Experiments package: configuration, run manifests, the pipeline commands,
result aggregation and the command-line entry point.
"""

from .commands import COMMANDS, RunContext, cmd_report, fraction_label
from .config import (
    ExperimentConfig,
    apply_overrides,
    config_from_dict,
    load_config,
    parse_override,
    save_config,
)
from .manifest import ManifestRecorder, RunManifest, load_manifest
from .report import RunReport, aggregate_runs, read_table, write_table

__all__ = [
    "ExperimentConfig",
    "config_from_dict",
    "load_config",
    "save_config",
    "parse_override",
    "apply_overrides",
    "RunManifest",
    "ManifestRecorder",
    "load_manifest",
    "RunContext",
    "COMMANDS",
    "cmd_report",
    "fraction_label",
    "RunReport",
    "aggregate_runs",
    "read_table",
    "write_table",
]
