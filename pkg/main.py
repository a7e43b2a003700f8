#!/usr/bin/env python3
"""
Main entry point of the gevrey toolkit.

This script runs one subcommand end to end:
1. Resolve the run config (defaults, config file, command-line overrides)
2. Load and validate the command registry
3. Invoke the subcommand, which writes its artifacts and a manifest
4. Print a summary and exit with the run's status

Usage:
    python main.py assoc --config config/examples/assoc.json
    python main.py verify --out outputs/verify --jobs 4

Exit status: 0 success, 1 verification FAIL, 2 configuration, parameter or
domain error, 130 when interrupted.
"""

# Load environment variables from .env file FIRST
from dotenv import load_dotenv
load_dotenv()

import argparse
import asyncio
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from commands.config import load_defaults, read_config_file, resolve_config
from commands.registry.invoker import CommandInvoker
from commands.registry.loader import load_registry, validate_registry
from commands.registry.registry import CommandRegistry
from commands.state import CommandResult
from core.artifacts import json_text
from core.errors import (
    EXIT_CONFIG_ERROR,
    EXIT_INTERRUPTED,
    EXIT_OK,
    EXIT_VERIFICATION_FAILED,
    ConfigurationError,
)

logging.basicConfig(
    level=os.getenv("GEVREY_LOG_LEVEL", "INFO").upper(),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)
logger = logging.getLogger(__name__)

ROOT = Path(__file__).resolve().parent
REGISTRY_PATH = ROOT / "config" / "commands.yaml"
DEFAULTS_PATH = ROOT / "config" / "defaults.yaml"
SUBCOMMANDS = ("assoc", "seqcheck", "bump", "bv", "wf", "verify")

# error types that mean "the input cannot be run", as opposed to a failed check
USAGE_ERRORS = {
    "ConfigurationError",
    "ParameterError",
    "DomainError",
    "CapabilityError",
    "DataError",
    "FileNotFoundError",
}


def setup_registry() -> CommandRegistry:
    """
    Load and validate the command registry.

    Raises:
        ConfigurationError: If the registry does not match the command packages
    """
    logger.debug(f"Loading command registry from: {REGISTRY_PATH}")
    registry = load_registry(str(REGISTRY_PATH), CommandRegistry())

    validation_results = validate_registry(registry, base_path=str(ROOT / "commands"))
    logger.debug(f"Registry validation: {validation_results['total_commands']} commands loaded")
    if not validation_results["valid"]:
        for error in validation_results.get("errors", []):
            logger.error(f"Registry validation error: {error}")
        raise ConfigurationError("Registry validation failed")
    return registry


def exit_code_for(result: CommandResult) -> int:
    status = result.get("status")
    if status == "success":
        return EXIT_OK
    if status == "failure":
        return EXIT_VERIFICATION_FAILED
    return EXIT_CONFIG_ERROR if result.get("error_type") in USAGE_ERRORS else EXIT_VERIFICATION_FAILED


def print_summary(result: CommandResult) -> None:
    """
    Print a summary of the run.

    Args:
        result: Result of the invoked command
    """
    status = result.get("status", "unknown")
    mark = "✓" if status == "success" else "✗"
    print("\n" + "=" * 80)
    print(f"{mark} {result.get('command_name')}: {status.upper()}")
    print("=" * 80)
    if result.get("error"):
        print(f"  {result.get('error_type')}: {result['error']}")
    for artifact in result.get("artifacts", []):
        print(f"  - {artifact}")
    if result.get("output"):
        print(json_text(result["output"]), end="")
    print("=" * 80)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Extended Gevrey classes: associated functions, boundary values and wave fronts"
    )
    parser.add_argument("subcommand", choices=SUBCOMMANDS, help="What to run")
    parser.add_argument("--config", help="JSON or YAML run config")
    parser.add_argument("--out", help="Output directory (default: outputs)")
    parser.add_argument("--seed", type=int, help="Seed of the randomized checks")
    parser.add_argument("--jobs", type=int, help="Concurrent checks per verify group")
    return parser


def overrides_from(args: argparse.Namespace) -> Dict[str, Any]:
    return {"subcommand": args.subcommand, "out": args.out, "seed": args.seed, "jobs": args.jobs}


async def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the exit status."""
    args = build_parser().parse_args(argv)

    try:
        raw = read_config_file(args.config) if args.config else {}
        if raw.get("subcommand") not in (None, args.subcommand):
            logger.warning(
                f"config file names subcommand {raw['subcommand']!r}; running {args.subcommand!r}"
            )
        config = resolve_config(raw, overrides_from(args), load_defaults(DEFAULTS_PATH))
        registry = setup_registry()
        metadata = registry.get_or_raise(config.subcommand)
    except (ConfigurationError, FileNotFoundError, KeyError) as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_CONFIG_ERROR

    try:
        logger.info(f"Running {config.subcommand} into {config.out}")
        invoker = CommandInvoker(default_timeout=config.timeout_seconds)
        result = await invoker.invoke(metadata, config, config.out)
        print_summary(result)
        return exit_code_for(result)

    except KeyboardInterrupt:
        logger.info("Run interrupted by user")
        return EXIT_INTERRUPTED
    except Exception as e:
        logger.error(f"Run failed: {str(e)}", exc_info=True)
        return EXIT_VERIFICATION_FAILED


if __name__ == "__main__":
    exit_code = asyncio.run(main())
    sys.exit(exit_code)
