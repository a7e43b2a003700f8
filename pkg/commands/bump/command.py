"""
bump: sample a cutoff and its derivatives and report its extended Gevrey norm.
"""

import logging
from typing import Any, Dict, List, Tuple

import numpy as np

from commands.base import BaseCommand
from commands.config import RunConfig
from commands.registry.registry import CommandMetadata
from core.artifacts import ArtifactWriter
from core.errors import ConfigurationError
from core.testfun import BumpFunction, gevrey_norm

logger = logging.getLogger(__name__)

PLATEAU_TOL = 1e-12


def axis_samples(bump: BumpFunction, samples: int) -> np.ndarray:
    """Points along axis 0 across the support box; other coordinates sit at the center."""
    lo, hi = bump.support_box()[0]
    axis = np.linspace(lo, hi, samples)
    points = np.tile(np.asarray(bump.center, dtype=np.float64), (samples, 1))
    points[:, 0] = axis
    return points


def axis_order(order: int, dimension: int) -> Tuple[int, ...]:
    return (order,) + (0,) * (dimension - 1)


class BumpCommand(BaseCommand):
    def get_metadata(self) -> CommandMetadata:
        return CommandMetadata(
            name="bump",
            command_type="analysis",
            description="Cutoff samples, derivatives and extended Gevrey norm",
            version="1.0.0",
            module_path="commands.bump.command",
            artifacts=["bump.txt", "bump_summary.yaml"],
        )

    def validate_input(self, config: RunConfig) -> None:
        block = config.bump
        top = max(max(block.orders), block.norm_alpha_max)
        if top > block.shape.max_order:
            raise ConfigurationError(
                f"bump.shape.max_order: derivatives up to order {top} requested, "
                f"the oracle serves {block.shape.max_order}"
            )

    def run(self, config: RunConfig, writer: ArtifactWriter) -> Tuple[bool, Dict[str, Any]]:
        params = config.params.to_params()
        block = config.bump
        bump = block.shape.build()
        points = axis_samples(bump, block.samples)
        x = points[:, 0]

        columns: List[str] = ["x"]
        data = [x]
        for order in block.orders:
            columns.append(f"d{order}")
            data.append(bump.derivative(axis_order(order, bump.dimension), points))
        writer.columns("bump.txt", columns, np.column_stack(data), comments={"center": list(bump.center)})

        values = bump.value(points)
        offset = np.abs(x - bump.center[0])
        plateau = offset <= bump.r_plateau
        outside = offset >= bump.axis_support
        plateau_error = float(np.max(np.abs(values[plateau] - 1.0))) if np.any(plateau) else 0.0
        outside_max = float(np.max(np.abs(values[outside]))) if np.any(outside) else 0.0

        norm = gevrey_norm(bump, None, params, block.norm_alpha_max, block.norm_grid_density)
        passed = (
            plateau_error <= PLATEAU_TOL
            and outside_max == 0.0
            and norm.stabilized
            and np.isfinite(norm.log_value)
        )
        writer.yaml(
            "bump_summary.yaml",
            {
                "params": params.to_dict(),
                "passed": passed,
                "center": list(bump.center),
                "r_plateau": bump.r_plateau,
                "r_support": bump.r_support,
                "plateau_max_error": plateau_error,
                "outside_support_max": outside_max,
                "norm": norm.to_dict(),
            },
        )
        if not norm.stabilized:
            logger.warning(f"norm not stabilized by order {block.norm_alpha_max}")
        return passed, {"passed": passed, "norm": norm.value, "worst_order": norm.worst_order}
