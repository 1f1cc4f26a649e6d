"""
Tests for experiment configuration files and overrides.
"""

from pathlib import Path

import pytest

from forcedyn.core.exceptions import ConfigError
from forcedyn.experiments.config import (
    DATA_FRACTIONS,
    ExperimentConfig,
    apply_overrides,
    config_from_dict,
    load_config,
    parse_override,
    save_config,
)
from forcedyn.geometry.catalog import BENCHMARK_HOLES


class TestDefaults:
    """Test the default configuration."""

    def test_defaults(self) -> None:
        """Test representative defaults of every section."""
        config = load_config()
        assert config.seed == 0
        assert config.grid.n == 9
        assert config.grid.grid_range == (4.0, 4.0)
        assert config.dynamics.hidden_size == 64
        assert config.finetune.fractions == DATA_FRACTIONS
        assert config.mpc.plan_config().n_samples == 200
        assert config.experiment.holes == BENCHMARK_HOLES
        assert config.reward.sigma is None

    def test_reward_bandwidth(self) -> None:
        """Test that a configured sigma wins over the derived one."""
        assert load_config().reward.reward_config(0.4).sigma == 0.4
        fixed = load_config(overrides=["reward.sigma=2.5"])
        assert fixed.reward.reward_config(0.4).sigma == 2.5


class TestOverrides:
    """Test --set expressions."""

    def test_parse_override(self) -> None:
        """Test that values are typed as YAML scalars."""
        assert parse_override("mpc.trials=20") == ("mpc", "trials", 20)
        assert parse_override("mpc.common_random_numbers=true")[2] is True
        assert parse_override("reward.sigma=") == ("reward", "sigma", None)
        assert parse_override("experiment.out=runs/a")[2] == "runs/a"

    @pytest.mark.parametrize("expression", ["mpc.trials", "trials=3", ".x=1", "mpc.=1"])
    def test_malformed(self, expression: str) -> None:
        """Test that expressions without section, key or value are refused."""
        with pytest.raises(ConfigError):
            parse_override(expression)

    def test_apply_does_not_mutate(self) -> None:
        """Test that overrides produce a new mapping."""
        data = {"mpc": {"trials": 5}}
        merged = apply_overrides(data, ["mpc.trials=7", "rl.episodes=3"])
        assert data == {"mpc": {"trials": 5}}
        assert merged == {"mpc": {"trials": 7}, "rl": {"episodes": 3}}

    def test_lists(self) -> None:
        """Test comma lists, single values and list types."""
        config = load_config(
            overrides=[
                "finetune.fractions=0.2,1.0",
                "mpc.data_fractions=1.0",
                "experiment.holes=round-15,square-15",
                "dataset.training_holes=round-10",
            ]
        )
        assert config.finetune.fractions == (0.2, 1.0)
        assert config.mpc.data_fractions == (1.0,)
        assert config.experiment.holes == ("round-15", "square-15")
        assert config.dataset.training_holes == ("round-10",)

    def test_integers_widen_to_floats(self) -> None:
        """Test that an integer is accepted where a number is expected."""
        assert load_config(overrides=["sim.f_max=12"]).sim.f_max == 12.0

    def test_seed_and_out_win(self) -> None:
        """Test that explicit seed and out arguments take precedence."""
        config = load_config(overrides=["experiment.seed=4"], seed=9, out="runs/nine")
        assert config.seed == 9
        assert config.out_dir == Path("runs/nine")


class TestValidation:
    """Test rejection of invalid settings."""

    @pytest.mark.parametrize(
        "overrides",
        [
            ["mpc.unknown=1"],
            ["nosuch.key=1"],
            ["mpc.trials=many"],
            ["mpc.trials=2.5"],
            ["mpc.common_random_numbers=1"],
            ["grid.n=1"],
            ["rl.data_fraction=0"],
            ["finetune.fractions=0.5,1.5"],
            ["mpc.elite_frac=2.0"],
            ["sim.force_noise=-1"],
        ],
    )
    def test_invalid(self, overrides: list) -> None:
        """Test unknown keys, wrong types and range violations."""
        with pytest.raises(ConfigError):
            load_config(overrides=overrides)

    def test_error_names_the_key(self) -> None:
        """Test that the dotted key is reported."""
        with pytest.raises(ConfigError) as exc_info:
            load_config(overrides=["dynamics.episodes=-1"])
        assert exc_info.value.key == "dynamics.episodes"

    def test_non_mapping(self) -> None:
        """Test that sections must be mappings."""
        with pytest.raises(ConfigError):
            config_from_dict({"mpc": [1, 2]})
        with pytest.raises(ConfigError):
            config_from_dict([1])  # type: ignore[arg-type]


class TestFiles:
    """Test configuration files."""

    def test_file_and_overrides(self, tmp_path: Path) -> None:
        """Test that --set values override the file."""
        path = tmp_path / "exp.yaml"
        path.write_text("mpc:\n  trials: 10\n  horizon: 3\nexperiment:\n  seed: 2\n")
        config = load_config(path, overrides=["mpc.trials=4"])
        assert (config.mpc.trials, config.mpc.horizon, config.seed) == (4, 3, 2)

    def test_empty_file(self, tmp_path: Path) -> None:
        """Test that an empty file means defaults."""
        path = tmp_path / "empty.yaml"
        path.write_text("")
        assert load_config(path) == ExperimentConfig()

    def test_missing_file(self, tmp_path: Path) -> None:
        """Test that a missing file raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            load_config(tmp_path / "absent.yaml")

    @pytest.mark.parametrize("text", ["mpc: [unclosed\n", "- just\n- a list\n"])
    def test_bad_yaml(self, tmp_path: Path, text: str) -> None:
        """Test that invalid YAML and non-mappings raise ConfigError."""
        path = tmp_path / "bad.yaml"
        path.write_text(text)
        with pytest.raises(ConfigError):
            load_config(path)

    def test_saved_config_reloads(self, tmp_path: Path) -> None:
        """Test that the canonical dump loads back to an equal configuration."""
        config = load_config(overrides=["finetune.fractions=0.2,0.4", "reward.sigma=0.5"])
        path = tmp_path / "config.yaml"
        save_config(config, path)
        assert load_config(path) == config


class TestHash:
    """Test the configuration hash."""

    def test_stable(self) -> None:
        """Test that equal configurations hash equally."""
        assert load_config().config_hash() == ExperimentConfig().config_hash()
        assert len(load_config().config_hash()) == 64

    def test_sensitive(self) -> None:
        """Test that any changed value changes the hash."""
        assert load_config(seed=1).config_hash() != load_config(seed=2).config_hash()
