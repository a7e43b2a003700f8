"""
Unit tests for run configuration resolution.

Tests cover:
- Defaults, config-file content and CLI overrides merging
- Validation errors carrying the dotted path of the offending field
- Manifest round trip
- Reading JSON and YAML config files
"""

import json
from pathlib import Path

import pytest

from commands.config import (
    RunConfig,
    load_defaults,
    manifest_of,
    read_config_file,
    resolve_config,
)
from core.errors import ConfigurationError
from core.params import GevreyParams

ROOT = Path(__file__).resolve().parents[2]


class TestResolveConfig:
    """Tests for resolve_config."""

    def test_in_code_defaults(self) -> None:
        """Test that a bare subcommand resolves to the in-code defaults."""
        config = resolve_config({"subcommand": "assoc"})
        assert isinstance(config, RunConfig)
        assert config.params.to_params() == GevreyParams(1.0, 2.0, 1.0)
        assert config.out == "outputs"
        assert config.seed == 0
        assert config.tolerances.pairing == 1e-6

    def test_shipped_defaults_file_validates(self) -> None:
        """Test that config/defaults.yaml is itself a valid config."""
        defaults = load_defaults(ROOT / "config" / "defaults.yaml")
        config = resolve_config({"subcommand": "verify"}, defaults=defaults)
        assert config.verify.random_points == 50
        assert config.bv.quadrature.order == 32

    def test_missing_defaults_file_is_empty(self, tmp_path: Path) -> None:
        """Test that a missing defaults file yields no defaults."""
        assert load_defaults(tmp_path / "absent.yaml") == {}

    def test_overrides_win_and_none_is_ignored(self) -> None:
        """Test precedence: defaults < file < overrides, with None overrides skipped."""
        config = resolve_config(
            {"subcommand": "bv", "seed": 3, "params": {"tau": 2.0}},
            overrides={"seed": 7, "out": None},
            defaults={"out": "elsewhere", "params": {"sigma": 3.0}},
        )
        assert config.seed == 7
        assert config.out == "elsewhere"
        assert config.params.tau == 2.0
        assert config.params.sigma == 3.0

    def test_invalid_sigma_names_the_field(self) -> None:
        """Test that sigma <= 1 is reported with its dotted path."""
        with pytest.raises(ConfigurationError, match="params.sigma"):
            resolve_config({"subcommand": "assoc", "params": {"sigma": 1.0}})

    def test_unknown_key_is_rejected(self) -> None:
        """Test that blocks forbid unknown keys."""
        with pytest.raises(ConfigurationError, match="assoc.bogus"):
            resolve_config({"subcommand": "assoc", "assoc": {"bogus": 1}})

    def test_unknown_subcommand_is_rejected(self) -> None:
        """Test that the subcommand is restricted to the known names."""
        with pytest.raises(ConfigurationError, match="subcommand"):
            resolve_config({"subcommand": "plot"})

    def test_bump_shape_ordering(self) -> None:
        """Test that r_plateau must be below r_support."""
        with pytest.raises(ConfigurationError, match="r_plateau must be smaller"):
            resolve_config({"subcommand": "bump", "bump": {"shape": {"r_plateau": 2.0, "r_support": 1.0}}})

    def test_pipeline_sample_count_power_of_two(self) -> None:
        """Test that the pipeline grid size must be a power of two."""
        with pytest.raises(ConfigurationError, match="power of two"):
            resolve_config({"subcommand": "wf", "wf": {"pipeline": {"n": 1000}}})

    def test_bad_cone_label(self) -> None:
        """Test that unparsable cone labels are configuration errors."""
        with pytest.raises(ConfigurationError, match="wf.cones"):
            resolve_config({"subcommand": "wf", "wf": {"cones": ["up"]}})

    def test_scalar_points_are_wrapped(self) -> None:
        """Test that one-dimensional points may be given as bare numbers."""
        config = resolve_config({"subcommand": "wf", "wf": {"points": [0.0, 0.5]}})
        assert config.wf.points == [[0.0], [0.5]]

    def test_verify_group_names(self) -> None:
        """Test that verify groups are restricted to the known groups."""
        with pytest.raises(ConfigurationError, match="verify.groups"):
            resolve_config({"subcommand": "verify", "verify": {"groups": ["plots"]}})


class TestManifest:
    """Tests for manifest_of."""

    def test_manifest_round_trip(self) -> None:
        """Test that a manifest resolves back to the same config."""
        config = resolve_config({"subcommand": "wf", "wf": {"tau_grid": [0.5, 1.0]}, "seed": 4})
        manifest = manifest_of(config)
        again = resolve_config(json.loads(json.dumps(manifest)))
        assert again == config
        assert manifest_of(again) == manifest

    def test_manifest_holds_every_block(self) -> None:
        """Test that the manifest echoes every block, not only the active one."""
        manifest = manifest_of(resolve_config({"subcommand": "seqcheck"}))
        for block in ("params", "tolerances", "assoc", "seqcheck", "bump", "bv", "wf", "verify"):
            assert block in manifest
        assert manifest["wf"]["variant"] == "T_threshold"


class TestReadConfigFile:
    """Tests for read_config_file."""

    def test_read_json(self, tmp_path: Path) -> None:
        """Test reading a JSON config."""
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"subcommand": "assoc", "seed": 2}))
        assert read_config_file(path) == {"subcommand": "assoc", "seed": 2}

    def test_read_yaml(self, tmp_path: Path) -> None:
        """Test reading a YAML config."""
        path = tmp_path / "run.yaml"
        path.write_text("subcommand: bump\nbump:\n  samples: 11\n")
        assert read_config_file(path)["bump"] == {"samples": 11}

    def test_missing_file(self, tmp_path: Path) -> None:
        """Test that a missing config file raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            read_config_file(tmp_path / "absent.json")

    def test_malformed_json(self, tmp_path: Path) -> None:
        """Test that unparsable content is a configuration error."""
        path = tmp_path / "run.json"
        path.write_text("{not json")
        with pytest.raises(ConfigurationError, match="cannot parse"):
            read_config_file(path)

    def test_non_mapping(self, tmp_path: Path) -> None:
        """Test that a top-level list is rejected."""
        path = tmp_path / "run.yaml"
        path.write_text("- assoc\n")
        with pytest.raises(ConfigurationError, match="mapping"):
            read_config_file(path)

    @pytest.mark.parametrize(
        "name",
        ["assoc.json", "seqcheck.json", "bump.json", "bv_inv_z.json", "bv_rational.json",
         "wf_heaviside.json", "wf_pipeline.json", "verify.json"],
    )
    def test_shipped_examples_validate(self, name: str) -> None:
        """Test that every example config resolves."""
        raw = read_config_file(ROOT / "config" / "examples" / name)
        config = resolve_config(raw, defaults=load_defaults(ROOT / "config" / "defaults.yaml"))
        assert config.subcommand == raw["subcommand"]
