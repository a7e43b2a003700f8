"""
assoc: tabulate T, T*, the sandwich exponents and the maximizing index over a k grid.
"""

import logging
import math
from typing import Any, Dict, Tuple

import numpy as np

from commands.base import BaseCommand
from commands.config import RunConfig
from commands.registry.registry import CommandMetadata
from core.artifacts import ArtifactWriter
from core.associated import T_values, bound_constants, bounds_values
from core.errors import ConfigurationError
from core.inequalities import check_shape, fit_sandwich, verify_inequalities

logger = logging.getLogger(__name__)

COLUMNS = ("k", "T", "T_star", "log_lower", "log_upper", "argmax_p")


def assoc_table(params: Any, log_k: np.ndarray) -> np.ndarray:
    """Rows (k, T, T*, log_lower, log_upper, argmax_p); bound columns are nan below k_min."""
    t, argmax = T_values(params, log_k)
    t_star, _ = T_values(params, log_k, star=True)
    lower = np.full(log_k.shape, np.nan)
    upper = np.full(log_k.shape, np.nan)
    guarded = log_k >= bound_constants(params).log_k_min
    if np.any(guarded):
        lower[guarded], upper[guarded] = bounds_values(params, log_k[guarded])
    return np.column_stack((np.exp(log_k), t, t_star, lower, upper, argmax.astype(np.float64)))


class AssocCommand(BaseCommand):
    def get_metadata(self) -> CommandMetadata:
        return CommandMetadata(
            name="assoc",
            command_type="analysis",
            description="Associated functions T and T* with sandwich bounds",
            version="1.0.0",
            module_path="commands.assoc.command",
            artifacts=["assoc.txt", "assoc_summary.yaml"],
        )

    def validate_input(self, config: RunConfig) -> None:
        if config.assoc.log_k_max > 700:
            raise ConfigurationError("assoc.log_k_max: k must stay below exp(700)")

    def run(self, config: RunConfig, writer: ArtifactWriter) -> Tuple[bool, Dict[str, Any]]:
        params = config.params.to_params()
        block = config.assoc
        log_k = np.linspace(block.log_k_min, block.log_k_max, block.points)
        rows = assoc_table(params, log_k)
        writer.columns("assoc.txt", COLUMNS, rows, comments=params.to_dict())

        shape = check_shape(params, log_k)
        sandwich = fit_sandwich(params, block.sandwich_points, block.sandwich_top)
        summary: Dict[str, Any] = {
            "params": params.to_dict(),
            "grid": {"log_k_min": block.log_k_min, "log_k_max": block.log_k_max, "points": block.points},
            "bound_constants": bound_constants(params).to_dict(),
            "shape": shape.to_dict(),
            "sandwich": sandwich.to_dict(),
        }
        passed = shape.passed and sandwich.passed

        if block.inequalities:
            k_grid = np.exp(np.arange(1, 21, dtype=np.float64))
            l_grid = np.exp(np.linspace(math.log(0.1), math.log(100.0), 40))
            report = verify_inequalities(
                [params],
                k_grid,
                l_grid,
                submultiplicative_k_grid=np.exp(np.linspace(0.0, math.log(1e6), 60)),
                sandwich_points=block.sandwich_points,
                sandwich_top=block.sandwich_top,
            )
            summary["inequalities"] = report.to_dict()
            passed = passed and report.passed

        summary["passed"] = passed
        writer.yaml("assoc_summary.yaml", summary)
        return passed, {"points": int(rows.shape[0]), "passed": passed}
