"""
Unit tests for the command registry system.

Tests cover:
- CommandMetadata creation and validation
- CommandRegistry registration and retrieval
- Loader functions for YAML configuration
- Package discovery and registry validation
"""

import os
import tempfile
from pathlib import Path

import pytest

from commands.registry.loader import (
    create_command_metadata,
    discover_commands,
    load_commands_from_yaml,
    load_registry,
    validate_registry,
)
from commands.registry.registry import (
    CommandMetadata,
    CommandRegistry,
    get_registry,
    reset_registry,
)

ROOT = Path(__file__).resolve().parents[2]


def _metadata(name: str, command_type: str = "analysis", **kwargs: object) -> CommandMetadata:
    return CommandMetadata(
        name=name,
        command_type=command_type,
        description=f"{name} command",
        version="1.0.0",
        module_path=f"commands.{name}.command",
        **kwargs,  # type: ignore[arg-type]
    )


class TestCommandMetadata:
    """Tests for CommandMetadata class."""

    def test_create_metadata(self) -> None:
        """Test creating command metadata."""
        metadata = CommandMetadata(
            name="assoc",
            command_type="analysis",
            description="Associated functions",
            version="1.0.0",
            module_path="commands.assoc.command",
            artifacts=["assoc.txt"],
        )
        assert metadata.name == "assoc"
        assert metadata.module_path == "commands.assoc.command"
        assert metadata.is_active is True
        assert metadata.artifacts == ["assoc.txt"]

    def test_metadata_requires_module_path(self) -> None:
        """Test that an empty module_path is rejected."""
        with pytest.raises(ValueError, match="requires 'module_path'"):
            CommandMetadata(
                name="broken",
                command_type="analysis",
                description="No module",
                version="1.0.0",
                module_path="",
            )

    def test_metadata_to_dict(self) -> None:
        """Test converting metadata to dictionary."""
        metadata = _metadata("bv", tags=["boundary"])
        data = metadata.to_dict()
        assert data["name"] == "bv"
        assert data["module_path"] == "commands.bv.command"
        assert data["tags"] == ["boundary"]
        assert data["is_active"] is True


class TestCommandRegistry:
    """Tests for CommandRegistry class."""

    @pytest.fixture
    def registry(self) -> CommandRegistry:
        """Create a fresh registry for each test."""
        return CommandRegistry()

    def test_register_and_get(self, registry: CommandRegistry) -> None:
        """Test registering a command and getting it back."""
        registry.register(_metadata("assoc"))
        retrieved = registry.get("assoc")
        assert retrieved is not None
        assert retrieved.name == "assoc"
        assert len(registry) == 1

    def test_register_duplicate_raises_error(self, registry: CommandRegistry) -> None:
        """Test that registering a duplicate command raises an error."""
        registry.register(_metadata("assoc"))
        with pytest.raises(ValueError, match="already registered"):
            registry.register(_metadata("assoc"))

    def test_get_nonexistent_returns_none(self, registry: CommandRegistry) -> None:
        """Test that getting an unknown command returns None."""
        assert registry.get("nonexistent") is None

    def test_get_or_raise_nonexistent_raises_error(self, registry: CommandRegistry) -> None:
        """Test that get_or_raise raises KeyError for an unknown command."""
        with pytest.raises(KeyError, match="not found"):
            registry.get_or_raise("nonexistent")

    def test_list_active_and_types(self, registry: CommandRegistry) -> None:
        """Test filtering by activity and listing command types."""
        registry.register(_metadata("assoc"))
        registry.register(_metadata("wf", is_active=False))
        registry.register(_metadata("verify", command_type="verification"))

        assert [c.name for c in registry.list_active()] == ["assoc", "verify"]
        assert sorted(registry.list_types()) == ["analysis", "verification"]

    def test_global_registry_reset(self) -> None:
        """Test that reset_registry drops the global instance."""
        first = get_registry()
        assert get_registry() is first
        reset_registry()
        assert get_registry() is not first
        reset_registry()


class TestCommandLoader:
    """Tests for command loader functions."""

    def test_load_commands_from_yaml(self) -> None:
        """Test loading command definitions from a YAML file."""
        yaml_content = """
commands:
  - name: assoc
    command_type: analysis
    description: Associated functions
    version: 1.0.0
    module_path: commands.assoc.command
"""
        with tempfile.NamedTemporaryFile(mode="w", suffix=".yaml", delete=False) as f:
            f.write(yaml_content)
            f.flush()

        try:
            commands = load_commands_from_yaml(f.name)
            assert len(commands) == 1
            assert commands[0]["name"] == "assoc"
        finally:
            os.unlink(f.name)

    def test_load_commands_file_not_found(self) -> None:
        """Test that loading from a missing file raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            load_commands_from_yaml("nonexistent_file.yaml")

    def test_create_metadata_missing_required_fields(self) -> None:
        """Test that missing required fields raise ValueError."""
        with pytest.raises(ValueError, match="missing required fields"):
            create_command_metadata({"name": "assoc"})

    def test_create_metadata_stringifies_version(self) -> None:
        """Test that a numeric YAML version becomes a string."""
        metadata = create_command_metadata(
            {
                "name": "assoc",
                "command_type": "analysis",
                "description": "d",
                "version": 1.0,
                "module_path": "commands.assoc.command",
            }
        )
        assert metadata.version == "1.0"

    def test_load_registry_skips_invalid_entries(self) -> None:
        """Test that invalid entries are logged and skipped."""
        yaml_content = """
commands:
  - name: assoc
    command_type: analysis
    description: Associated functions
    version: 1.0.0
    module_path: commands.assoc.command
  - name: broken
"""
        with tempfile.NamedTemporaryFile(mode="w", suffix=".yaml", delete=False) as f:
            f.write(yaml_content)
            f.flush()

        try:
            registry = load_registry(f.name, CommandRegistry())
            assert len(registry) == 1
            assert "assoc" in registry
        finally:
            os.unlink(f.name)

    def test_load_registry_missing_file_is_empty(self) -> None:
        """Test that a missing registry file yields an empty registry."""
        registry = load_registry("nonexistent_file.yaml", CommandRegistry())
        assert len(registry) == 0

    def test_shipped_registry_is_valid(self) -> None:
        """Test that config/commands.yaml matches the command packages."""
        registry = load_registry(str(ROOT / "config" / "commands.yaml"), CommandRegistry())
        results = validate_registry(registry, base_path=str(ROOT / "commands"))
        assert results["valid"], results["errors"]
        assert results["total_commands"] == 6
        assert sorted(c.name for c in registry.list_all()) == [
            "assoc",
            "bump",
            "bv",
            "seqcheck",
            "verify",
            "wf",
        ]

    def test_discover_commands_excludes_registry(self) -> None:
        """Test that package discovery skips the registry package."""
        discovered = discover_commands(str(ROOT / "commands"))
        assert "registry" not in discovered
        assert "verify" in discovered

    def test_validate_registry_reports_orphans(self) -> None:
        """Test that unregistered packages and bad module paths are reported."""
        registry = CommandRegistry()
        registry.register(
            CommandMetadata(
                name="stray",
                command_type="analysis",
                description="d",
                version="1.0.0",
                module_path="elsewhere.stray",
            )
        )
        results = validate_registry(registry, base_path=str(ROOT / "commands"))
        assert results["valid"] is False
        assert any("must live under 'commands.'" in e for e in results["errors"])
        assert any("'assoc' is not registered" in e for e in results["errors"])
