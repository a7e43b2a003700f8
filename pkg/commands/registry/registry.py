"""
Command registry for the CLI subcommands.

Each subcommand (assoc, seqcheck, bump, bv, wf, verify) is described by a
``CommandMetadata`` entry naming the module that implements it. The CLI
resolves subcommands through the registry, and the invoker imports their
modules lazily.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional
import logging

logger = logging.getLogger(__name__)


@dataclass
class CommandMetadata:
    """
    Metadata about a subcommand.

    Attributes:
        name: Unique subcommand name as typed on the command line
        command_type: Category (analysis or verification)
        description: Human-readable description
        version: Semantic version of the command's output format
        module_path: Python module holding the command class
        artifacts: File names the command writes
        tags: Tags for categorization
        is_active: Whether the command is available
        author: Maintainer
        metadata: Additional custom metadata
    """

    name: str
    command_type: str
    description: str
    version: str
    module_path: str
    artifacts: List[str] = field(default_factory=list)
    tags: List[str] = field(default_factory=list)
    is_active: bool = True
    author: Optional[str] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        """Validate metadata after initialization."""
        if not self.module_path:
            raise ValueError(f"Command '{self.name}' requires 'module_path'")

    def to_dict(self) -> Dict[str, Any]:
        """Convert metadata to dictionary."""
        return {
            "name": self.name,
            "command_type": self.command_type,
            "description": self.description,
            "version": self.version,
            "module_path": self.module_path,
            "artifacts": self.artifacts,
            "tags": self.tags,
            "is_active": self.is_active,
            "author": self.author,
            "metadata": self.metadata,
        }


class CommandRegistry:
    """
    Central registry of subcommands.

    Maintains metadata about every available subcommand and provides
    methods to register, retrieve, and list them.
    """

    def __init__(self) -> None:
        """Initialize the registry."""
        self._commands: Dict[str, CommandMetadata] = {}
        self._commands_by_type: Dict[str, List[str]] = {}
        logger.debug("CommandRegistry initialized")

    def register(self, metadata: CommandMetadata) -> None:
        """
        Register a command.

        Args:
            metadata: CommandMetadata describing the command

        Raises:
            ValueError: If a command with the same name is already registered
        """
        if metadata.name in self._commands:
            raise ValueError(f"Command '{metadata.name}' is already registered")

        self._commands[metadata.name] = metadata
        self._commands_by_type.setdefault(metadata.command_type, []).append(metadata.name)

        logger.debug(
            f"Registered command '{metadata.name}' "
            f"(type: {metadata.command_type}, module: {metadata.module_path})"
        )

    def get(self, command_name: str) -> Optional[CommandMetadata]:
        """
        Get command metadata by name.

        Returns:
            CommandMetadata if found, None otherwise
        """
        return self._commands.get(command_name)

    def get_or_raise(self, command_name: str) -> CommandMetadata:
        """
        Get command metadata by name, raising if not found.

        Raises:
            KeyError: If the command is not registered
        """
        if command_name not in self._commands:
            raise KeyError(f"Command '{command_name}' not found in registry")
        return self._commands[command_name]

    def list_all(self) -> List[CommandMetadata]:
        return list(self._commands.values())

    def list_active(self) -> List[CommandMetadata]:
        return [cmd for cmd in self._commands.values() if cmd.is_active]

    def list_types(self) -> List[str]:
        return list(self._commands_by_type.keys())

    def __len__(self) -> int:
        return len(self._commands)

    def __contains__(self, command_name: str) -> bool:
        return command_name in self._commands


# Global registry instance
_global_registry: Optional[CommandRegistry] = None


def get_registry() -> CommandRegistry:
    """Get the global command registry instance."""
    global _global_registry
    if _global_registry is None:
        _global_registry = CommandRegistry()
    return _global_registry


def reset_registry() -> None:
    """Reset the global registry (useful for testing)."""
    global _global_registry
    _global_registry = None
