"""
Command invoker.

Provides one interface for running registered subcommands:
- Dynamic loading of command classes from their module paths
- Caching of command instances
- Timeouts
- Conversion of exceptions into error results
"""

import asyncio
import importlib
import inspect
import logging
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional, Union

from commands.config import RunConfig
from commands.registry.registry import CommandMetadata
from commands.state import CommandResult

logger = logging.getLogger(__name__)

REQUIRED_RESULT_FIELDS = ("status", "output", "artifacts", "execution_time_seconds")


class CommandInvoker:
    """
    Loads and runs subcommands.

    Attributes:
        default_timeout: Seconds before a command is abandoned
        command_cache: module_path -> command instance
    """

    def __init__(self, default_timeout: float = 1800.0):
        self.default_timeout = default_timeout
        self.command_cache: Dict[str, Any] = {}
        logger.debug(f"CommandInvoker initialized (timeout={default_timeout}s)")

    async def invoke(
        self,
        command_metadata: CommandMetadata,
        config: RunConfig,
        out_dir: Union[str, Path],
        timeout: Optional[float] = None,
    ) -> CommandResult:
        """
        Run a command and return its result; never raises for command failures.

        Args:
            command_metadata: Registry entry of the command
            config: Resolved run config
            out_dir: Artifact directory
            timeout: Optional timeout override (seconds)
        """
        timeout_seconds = timeout or self.default_timeout
        logger.info(f"Invoking command: {command_metadata.name} ({command_metadata.module_path})")
        try:
            command = self._get_or_load_command(command_metadata.module_path, command_metadata.name)
            result = await asyncio.wait_for(command.execute(config, out_dir), timeout=timeout_seconds)
            return self._ensure_valid_result(result, command_metadata.name)

        except asyncio.TimeoutError:
            logger.error(f"Command {command_metadata.name} timed out after {timeout_seconds}s")
            return self._create_error_result(
                command_metadata.name, f"Command timed out after {timeout_seconds}s", "TimeoutError"
            )
        except Exception as e:
            logger.error(f"Error invoking command {command_metadata.name}: {e}", exc_info=True)
            return self._create_error_result(command_metadata.name, str(e), type(e).__name__)

    def _get_or_load_command(self, module_path: str, command_name: str) -> Any:
        """
        Get a cached command instance or import and instantiate it.

        Raises:
            ImportError: If the module cannot be imported
            AttributeError: If no command class is found in the module
        """
        if module_path in self.command_cache:
            logger.debug(f"Using cached command: {module_path}")
            return self.command_cache[module_path]

        try:
            module = importlib.import_module(module_path)
        except ImportError as e:
            raise ImportError(f"Cannot import command module {module_path}: {e}") from e

        class_name = self._infer_command_class_name(command_name)
        if not hasattr(module, class_name):
            for attr_name in dir(module):
                attr = getattr(module, attr_name)
                if (
                    isinstance(attr, type)
                    and attr_name.endswith("Command")
                    and not inspect.isabstract(attr)
                ):
                    class_name = attr_name
                    break
            else:
                raise AttributeError(f"Cannot find command class in {module_path} for {command_name}")

        instance = getattr(module, class_name)()
        logger.debug(f"Loaded command {module_path}.{class_name}")
        self.command_cache[module_path] = instance
        return instance

    def _infer_command_class_name(self, command_name: str) -> str:
        """snake_case command name -> CamelCase class name ending in Command ("bv" -> "BvCommand")."""
        camel_case = "".join(word.capitalize() for word in command_name.split("_"))
        if not camel_case.endswith("Command"):
            camel_case += "Command"
        return camel_case

    def _ensure_valid_result(self, result: Any, command_name: str) -> CommandResult:
        """
        Check and normalize a command result.

        Raises:
            ValueError: If the result is not a dict or lacks required fields
        """
        if not isinstance(result, dict):
            raise ValueError(f"Result must be a dictionary, got {type(result)}")
        missing_fields = [f for f in REQUIRED_RESULT_FIELDS if f not in result]
        if missing_fields:
            raise ValueError(f"Result missing required fields for {command_name}: {missing_fields}")
        return {
            "command_name": command_name,
            "status": str(result["status"]),
            "output": result.get("output", {}),
            "artifacts": list(result.get("artifacts", [])),
            "execution_time_seconds": float(result.get("execution_time_seconds", 0.0)),
            "error": result.get("error"),
            "error_type": result.get("error_type"),
            "metadata": result.get("metadata", {}),
        }

    def _create_error_result(self, command_name: str, error_message: str, error_type: str) -> CommandResult:
        return {
            "command_name": command_name,
            "status": "error",
            "output": {},
            "artifacts": [],
            "execution_time_seconds": 0.0,
            "error": error_message,
            "error_type": error_type,
            "metadata": {"error_timestamp": datetime.now().isoformat()},
        }

