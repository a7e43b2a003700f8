"""
Base class for the CLI subcommands.

A command validates its block of the run config, does its numerical work
in ``run`` (synchronous, called in a worker thread), writes artifacts through
an ``ArtifactWriter`` and reports whether every check it makes passed.
``execute`` wraps this into the standard ``CommandResult``.
"""

import asyncio
import logging
import time
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, Tuple, Union

from commands.config import RunConfig, manifest_of
from commands.registry.registry import CommandMetadata
from commands.state import CommandResult
from core.artifacts import ArtifactWriter

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


class BaseCommand(ABC):
    """
    Abstract base class for all subcommands.

    Each command is responsible for:
    1. Describing itself for the registry
    2. Validating the parts of the run config it needs
    3. Running its computation and writing its artifacts
    4. Returning a verdict and a summary

    Example:
        class AssocCommand(BaseCommand):
            def get_metadata(self) -> CommandMetadata:
                return CommandMetadata(name="assoc", ...)

            def validate_input(self, config: RunConfig) -> None:
                ...

            def run(self, config: RunConfig, writer: ArtifactWriter) -> Tuple[bool, Dict[str, Any]]:
                writer.columns("assoc.txt", [...], rows)
                return True, {"points": len(rows)}
    """

    @abstractmethod
    def get_metadata(self) -> CommandMetadata:
        """Return metadata about this command for the registry."""

    @abstractmethod
    def validate_input(self, config: RunConfig) -> None:
        """
        Check the config block of this command beyond schema validation.

        Raises:
            ConfigurationError: If the block cannot be run
        """

    @abstractmethod
    def run(self, config: RunConfig, writer: ArtifactWriter) -> Tuple[bool, Dict[str, Any]]:
        """
        Do the work and write the artifacts.

        Returns:
            (passed, output): passed is False when a reported inequality or
            containment check is violated
        """

    async def execute(self, config: RunConfig, out_dir: Union[str, Path]) -> CommandResult:
        """
        Validate, run in a worker thread, write the manifest and return the result.

        Exceptions propagate; the invoker turns them into error results.
        """
        name = self.get_metadata().name
        start = time.perf_counter()
        self.validate_input(config)
        writer = ArtifactWriter(Path(out_dir))
        passed, output = await asyncio.to_thread(self.run, config, writer)
        writer.json(MANIFEST_NAME, manifest_of(config))
        elapsed = time.perf_counter() - start
        logger.info(f"command {name} finished in {elapsed:.2f}s: {'PASS' if passed else 'FAIL'}")
        return {
            "command_name": name,
            "status": "success" if passed else "failure",
            "output": output,
            "artifacts": writer.written,
            "execution_time_seconds": elapsed,
            "error": None,
            "error_type": None,
            "metadata": {"digests": dict(writer.digests)},
        }
