"""
wf: wave front verdicts for a signal fixture, a sample file or a boundary-value proxy.
"""

import logging
from typing import Any, Dict, List, Tuple

import numpy as np

from commands.base import BaseCommand
from commands.config import RunConfig, WfConfig
from commands.registry.registry import CommandMetadata
from core.artifacts import ArtifactWriter
from core.errors import ConfigurationError
from core.signals import SampledDistribution, load_samples, make_signal
from core.tube import make_fixture
from core.wavefront import WFReport, boundary_wf_pipeline, wf_analyze, wf_tau_profile

logger = logging.getLogger(__name__)

CURVE_COLUMNS = ("point", "cone", "xi", "magnitude", "threshold")


def load_signal(block: WfConfig) -> SampledDistribution:
    if block.sample_file is not None:
        return load_samples(block.sample_file)
    if block.signal is None:
        raise ConfigurationError("wf: set one of signal, sample_file or pipeline")
    return make_signal(block.signal, **block.signal_args)


def curve_rows(report: WFReport, points: List[Tuple[float, ...]], labels: List[str]) -> np.ndarray:
    """Decay curves of every verdict, keyed by point and cone index."""
    blocks = []
    for v in report.verdicts:
        curve = v.decay_curve
        keys = np.tile([float(points.index(v.point)), float(labels.index(v.cone.label))], (curve.shape[0], 1))
        blocks.append(np.hstack((keys, curve)))
    if not blocks:
        return np.zeros((0, len(CURVE_COLUMNS)))
    return np.vstack(blocks)


class WfCommand(BaseCommand):
    def get_metadata(self) -> CommandMetadata:
        return CommandMetadata(
            name="wf",
            command_type="analysis",
            description="Wave front verdicts with h-profiles and decay curves",
            version="1.0.0",
            module_path="commands.wf.command",
            artifacts=["wf_report.yaml", "wf_curves.txt"],
        )

    def validate_input(self, config: RunConfig) -> None:
        block = config.wf
        dimensions = {len(p) for p in block.points}
        if len(dimensions) != 1:
            raise ConfigurationError("wf.points: every point needs the same number of coordinates")
        cone_dims = {cone.dimension for cone in block.cone_specs()}
        if cone_dims != dimensions:
            raise ConfigurationError(f"wf.cones: cone dimension {cone_dims} differs from points {dimensions}")
        if block.window.center != [0.0] * len(block.window.center) or len(block.window.center) not in dimensions:
            raise ConfigurationError("wf.window.center: the window is recentered per point; give the origin")
        if block.pipeline is not None and block.sample_file is not None:
            raise ConfigurationError("wf: pipeline and sample_file are exclusive")

    def run(self, config: RunConfig, writer: ArtifactWriter) -> Tuple[bool, Dict[str, Any]]:
        params = config.params.to_params()
        block = config.wf
        cones = block.cone_specs()
        window = block.window.build()
        search = block.search()
        points = [tuple(float(c) for c in p) for p in block.points]
        summary: Dict[str, Any] = {"params": params.to_dict()}
        passed = True

        if block.pipeline is not None:
            pipe = block.pipeline
            F = make_fixture(pipe.fixture, **{"dimension": len(points[0]), **pipe.fixture_args})
            result = boundary_wf_pipeline(
                F,
                None,
                points,
                params,
                sampling=pipe.sampling(),
                search=search,
                window=window,
                cones=cones,
                growth_H=pipe.growth_H,
            )
            report = result.report
            summary["source"] = {"pipeline": F.describe()}
            summary["pipeline"] = {k: v for k, v in result.to_dict().items() if k != "report"}
            passed = result.contained
            if not result.contained:
                logger.warning(f"singular directions outside the dual cone: {result.violations}")
        else:
            u = load_signal(block)
            summary["source"] = (
                {"sample_file": block.sample_file}
                if block.sample_file is not None
                else {"signal": block.signal, "args": block.signal_args}
            )
            report = wf_analyze(u, points, cones, params, search, block.variant, window)
            if block.tau_grid:
                profile = wf_tau_profile(u, points, cones, params, block.tau_grid, search, block.variant, window)
                summary["tau_profile"] = profile.to_dict()
                passed = passed and profile.monotone

        summary["report"] = report.to_dict()
        summary["singular"] = [{"point": list(p), "cone": c} for p, c in report.singular_set()]
        passed = passed and all(v.profile_monotone for v in report.verdicts)
        summary["passed"] = passed

        labels = [cone.label for cone in cones]
        writer.columns(
            "wf_curves.txt",
            CURVE_COLUMNS,
            curve_rows(report, points, labels),
            comments={"points": [list(p) for p in points], "cones": labels},
        )
        writer.yaml("wf_report.yaml", summary)
        logger.info(f"wf: {len(report.singular_set())} singular of {len(report.verdicts)} verdicts")
        return passed, {"passed": passed, "singular": summary["singular"]}
