"""
bv: pair the boundary value of a tube fixture with a cutoff, by the Stokes
identity and by direct extrapolation t -> 0.
"""

import logging
import math
from typing import Any, Dict, Tuple

import numpy as np

from commands.base import BaseCommand
from commands.config import RunConfig
from commands.registry.registry import CommandMetadata
from core.artifacts import ArtifactWriter
from core.boundary import direct_pairing, growth_check, stokes_pairing
from core.errors import ConfigurationError
from core.tube import TubeFunction, make_fixture

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ("t", "re", "im", "extrapolant_re", "extrapolant_im")


def build_fixture(name: str, args: Dict[str, Any], dimension: int) -> TubeFunction:
    return make_fixture(name, **{"dimension": dimension, **args})


def plemelj_reference(phi: Any) -> complex:
    """-i pi phi(0): the pairing of 1/(x + i0) with a cutoff symmetric about 0."""
    return complex(-1j * math.pi * float(phi.value(np.array([0.0]))[0]))


class BvCommand(BaseCommand):
    def get_metadata(self) -> CommandMetadata:
        return CommandMetadata(
            name="bv",
            command_type="analysis",
            description="Boundary-value pairing of a tube fixture with a cutoff",
            version="1.0.0",
            module_path="commands.bv.command",
            artifacts=["bv_summary.yaml", "bv_trace.txt"],
        )

    def validate_input(self, config: RunConfig) -> None:
        block = config.bv
        if len(block.Y) != len(block.bump.center):
            raise ConfigurationError(
                f"bv.Y: direction has {len(block.Y)} components, the bump lives in dimension "
                f"{len(block.bump.center)}"
            )
        if not block.methods:
            raise ConfigurationError("bv.methods: choose at least one of stokes, direct")

    def run(self, config: RunConfig, writer: ArtifactWriter) -> Tuple[bool, Dict[str, Any]]:
        params = config.params.to_params()
        block = config.bv
        tolerance = config.tolerances.pairing
        phi = block.bump.build()
        F = build_fixture(block.fixture, block.fixture_args, phi.dimension)
        summary: Dict[str, Any] = {"params": params.to_dict(), "fixture": F.describe(), "Y": block.Y}
        output: Dict[str, Any] = {}
        passed = True

        if block.growth is not None:
            growth = growth_check(F, params, block.growth.H, block.growth.build())
            summary["growth"] = growth.to_dict()
            if not growth.passed:
                logger.warning(f"{F.name} grows too fast toward the edge; pairings skipped")
                summary["passed"] = False
                writer.yaml("bv_summary.yaml", summary)
                return False, {"growth_passed": False}

        stokes = direct = None
        if "stokes" in block.methods:
            stokes = stokes_pairing(F, phi, params, block.Y, block.quadrature.build())
            summary["stokes"] = stokes.to_dict()
            output["stokes"] = stokes.value
        if "direct" in block.methods:
            direct = direct_pairing(F, phi, block.direct_t_sequence, block.Y, tolerance)
            summary["direct"] = direct.to_dict()
            output["direct"] = direct.value
            passed = passed and direct.converged
            rows = np.column_stack(
                (
                    np.asarray(direct.t_values),
                    np.real(direct.per_t),
                    np.imag(direct.per_t),
                    np.real(direct.extrapolants),
                    np.imag(direct.extrapolants),
                )
            )
            writer.columns("bv_trace.txt", TRACE_COLUMNS, rows, comments={"fixture": F.name})

        if stokes is not None and direct is not None:
            difference = abs(stokes.value - direct.value)
            summary["method_difference"] = difference
            passed = passed and difference <= tolerance

        if F.name == "inv_z" and F.dimension == 1 and phi.center == (0.0,):
            reference = plemelj_reference(phi)
            value = stokes.value if stokes is not None else direct.value  # type: ignore[union-attr]
            summary["plemelj_reference"] = [reference.real, reference.imag]
            summary["plemelj_error"] = abs(value - reference)
            passed = passed and summary["plemelj_error"] <= tolerance

        summary["passed"] = passed
        writer.yaml("bv_summary.yaml", summary)
        return passed, {**output, "passed": passed}
