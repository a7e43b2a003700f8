"""
Command registry loader.

Loads subcommand definitions from ``config/commands.yaml`` and discovers
command packages on disk.
"""

import os
import logging
from typing import Dict, List, Any, Optional
import yaml

from commands.registry.registry import (
    CommandRegistry,
    CommandMetadata,
    get_registry,
)

logger = logging.getLogger(__name__)

REQUIRED_FIELDS = {"name", "command_type", "description", "version", "module_path"}


def load_commands_from_yaml(config_path: str) -> List[Dict[str, Any]]:
    """
    Load command definitions from a YAML file.

    Args:
        config_path: Path to commands.yaml

    Returns:
        List of command definitions

    Raises:
        FileNotFoundError: If the config file is not found
        yaml.YAMLError: If the YAML is invalid
    """
    if not os.path.exists(config_path):
        raise FileNotFoundError(f"Configuration file not found: {config_path}")

    with open(config_path, "r") as f:
        config: Dict[str, Any] = yaml.safe_load(f) or {}

    commands: List[Dict[str, Any]] = config.get("commands", [])
    logger.debug(f"Loaded {len(commands)} commands from {config_path}")
    return commands


def create_command_metadata(command_def: Dict[str, Any]) -> CommandMetadata:
    """
    Create a CommandMetadata object from a command definition.

    Raises:
        ValueError: If required fields are missing
    """
    missing_fields = REQUIRED_FIELDS - set(command_def.keys())
    if missing_fields:
        raise ValueError(f"Command definition missing required fields: {sorted(missing_fields)}")

    return CommandMetadata(
        name=command_def["name"],
        command_type=command_def["command_type"],
        description=command_def["description"],
        version=str(command_def["version"]),
        module_path=command_def["module_path"],
        artifacts=command_def.get("artifacts", []),
        tags=command_def.get("tags", []),
        is_active=command_def.get("is_active", True),
        author=command_def.get("author"),
        metadata=command_def.get("metadata", {}),
    )


def load_registry(
    config_path: str = "config/commands.yaml",
    registry: Optional[CommandRegistry] = None,
) -> CommandRegistry:
    """
    Load all commands from the configuration file into the registry.

    Invalid entries are logged and skipped; a missing file leaves the registry empty.

    Args:
        config_path: Path to commands.yaml
        registry: Registry to populate (uses the global one if not provided)

    Returns:
        The populated CommandRegistry
    """
    if registry is None:
        registry = get_registry()

    try:
        command_defs = load_commands_from_yaml(config_path)
    except FileNotFoundError:
        logger.warning(f"Config file not found at {config_path}, using empty registry")
        return registry

    registered_count = 0
    failed_count = 0

    for command_def in command_defs:
        try:
            metadata = create_command_metadata(command_def)
            registry.register(metadata)
            registered_count += 1
        except (ValueError, KeyError) as e:
            logger.error(f"Failed to register command {command_def.get('name', 'unknown')}: {e}")
            failed_count += 1

    logger.debug(f"Registry loading complete: {registered_count} registered, {failed_count} failed")
    return registry


def discover_commands(base_path: str = "commands") -> List[str]:
    """
    List command packages: subdirectories of base_path with an __init__.py,
    excluding the registry package itself.
    """
    if not os.path.isdir(base_path):
        logger.warning(f"Base path not found: {base_path}")
        return []

    discovered: List[str] = []
    for item in sorted(os.listdir(base_path)):
        item_path = os.path.join(base_path, item)
        if (
            item != "registry"
            and os.path.isdir(item_path)
            and os.path.exists(os.path.join(item_path, "__init__.py"))
        ):
            discovered.append(item)

    logger.debug(f"Discovered {len(discovered)} command packages: {discovered}")
    return discovered


def validate_registry(registry: CommandRegistry, base_path: Optional[str] = None) -> Dict[str, Any]:
    """
    Validate the registry for consistency and completeness.

    When ``base_path`` is given, every discovered command package must be
    registered and every registered module must live in a discovered package.

    Returns:
        Dictionary with validation results
    """
    errors: List[str] = []
    results: Dict[str, Any] = {
        "valid": True,
        "total_commands": len(registry),
        "active_commands": len(registry.list_active()),
        "command_types": registry.list_types(),
        "errors": errors,
    }

    for command in registry.list_all():
        if not command.module_path.startswith("commands."):
            errors.append(f"Command '{command.name}' module_path must live under 'commands.'")

    if base_path is not None:
        discovered = set(discover_commands(base_path))
        registered = {cmd.module_path.split(".")[1] for cmd in registry.list_all() if "." in cmd.module_path}
        for missing in sorted(discovered - registered):
            errors.append(f"Command package '{missing}' is not registered")
        for orphan in sorted(registered - discovered):
            errors.append(f"Registered package '{orphan}' was not found under {base_path}")

    results["valid"] = not errors
    return results
