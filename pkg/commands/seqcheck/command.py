"""
seqcheck: log-convexity, the (M.2)-type constants and (M.3)'-type summability of M_p.
"""

import logging
from typing import Any, Dict, Tuple

import numpy as np

from commands.base import BaseCommand
from commands.config import RunConfig
from commands.registry.registry import CommandMetadata
from core.artifacts import ArtifactWriter
from core.errors import ConfigurationError
from core.sequences import check_conditions, factorial_dominance_log_constant, log_M, log_m, power_inequalities

logger = logging.getLogger(__name__)


class SeqcheckCommand(BaseCommand):
    def get_metadata(self) -> CommandMetadata:
        return CommandMetadata(
            name="seqcheck",
            command_type="analysis",
            description="Conditions on the weight sequence M_p",
            version="1.0.0",
            module_path="commands.seqcheck.command",
            artifacts=["seqcheck.txt", "seqcheck_summary.yaml"],
        )

    def validate_input(self, config: RunConfig) -> None:
        if config.seqcheck.pq_max > 2000:
            raise ConfigurationError("seqcheck.pq_max: the pair grid is limited to 2000")

    def run(self, config: RunConfig, writer: ArtifactWriter) -> Tuple[bool, Dict[str, Any]]:
        params = config.params.to_params()
        block = config.seqcheck
        report = check_conditions(params, block.p_max, block.pq_max)
        power = power_inequalities(params, block.power_p_max)

        p = np.arange(block.p_max + 1)
        rows = np.column_stack(
            (
                p.astype(np.float64),
                np.asarray(log_M(p, params), dtype=np.float64),
                np.asarray(log_m(p, params), dtype=np.float64),
                np.asarray(report.m2_prime_required, dtype=np.float64),
            )
        )
        writer.columns("seqcheck.txt", ("p", "log_M", "log_m", "m2_prime_required_log_C"), rows)

        passed = report.passed and power.passed
        writer.yaml(
            "seqcheck_summary.yaml",
            {
                "params": params.to_dict(),
                "passed": passed,
                "conditions": report.to_dict(),
                "power_inequalities": power.to_dict(),
                "factorial_dominance_log_C": factorial_dominance_log_constant(params)[0],
            },
        )
        if not passed:
            logger.warning(f"sequence conditions failed for {params.to_dict()}")
        return passed, {"passed": passed, "m2_prime_log_C": report.m2_prime_log_C, "m2_log_C": report.m2_log_C}
