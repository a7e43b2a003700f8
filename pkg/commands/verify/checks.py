"""
The verification suite: one function per check, grouped by the verify graph node that runs it.

Every check returns a CheckRecord. Verdicts, details and constants depend only
on the config and the seed, never on timing or scheduling.
"""

import logging
import math
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, NamedTuple

import numpy as np

from commands.assoc.command import AssocCommand
from commands.config import RunConfig, ToleranceConfig, resolve_config
from commands.state import CheckRecord
from core.artifacts import ArtifactWriter
from core.associated import T_values, bound_constants
from core.boundary import (
    build_extension,
    dbar_envelope,
    dbar_extension,
    direct_pairing,
    extension_envelope,
    extension_series_log_constant,
    growth_check,
    stokes_pairing,
)
from core.inequalities import (
    check_monotone_and_star,
    check_shape,
    fit_exchange,
    fit_sandwich,
    fit_submultiplicative,
)
from core.params import GevreyParams
from core.quadrature import QuadratureSpec, ridders_derivative
from core.sequences import check_conditions, log_M, power_inequalities
from core.signals import gaussian, heaviside
from core.testfun import BumpFunction, Combination, RecordingTestFunction, gevrey_norm
from core.tube import combine, exp_inv_z, gaussian_entire, inv_z
from core.wavefront import (
    PipelineSampling,
    boundary_wf_pipeline,
    default_band,
    default_cones,
    default_window,
    dtft_direct,
    spectrum_localized,
    wf_analyze,
    wf_tau_profile,
)

logger = logging.getLogger(__name__)

# Checks with closed-form expected values are pinned to these parameters.
REFERENCE_PARAMS = GevreyParams(tau=1.0, sigma=2.0, h=1.0)
SANDWICH_TOP = 1e8
WF_POINTS = [[-0.5], [0.0], [0.5]]
WIRTINGER_FLOOR = 1e-3
BUMP_ORACLE_POINTS = 100
BUMP_ORACLE_ORDERS = tuple(range(1, 7))
GROWTH_H = 1.0
DTFT_BINS = 64


@dataclass(frozen=True)
class CheckContext:
    """What a check may read: parameters, tolerances and the seed."""

    params: GevreyParams
    tolerances: ToleranceConfig
    seed: int
    random_points: int

    @classmethod
    def from_config(cls, config: RunConfig) -> "CheckContext":
        return cls(
            params=config.params.to_params(),
            tolerances=config.tolerances,
            seed=config.seed,
            random_points=config.verify.random_points,
        )


class CheckSpec(NamedTuple):
    id: int
    name: str
    group: str
    budget_seconds: float
    run: Callable[[CheckContext], CheckRecord]


def _record(
    spec_id: int, check_name: str, check_group: str, verdict: bool, detail: str, **constants: Any
) -> CheckRecord:
    return {
        "id": spec_id,
        "name": check_name,
        "group": check_group,
        "passed": bool(verdict),
        "detail": detail,
        "constants": constants,
    }


# sequences


def check_conditions_reference(ctx: CheckContext) -> CheckRecord:
    report = check_conditions(REFERENCE_PARAMS, 100, 150)
    c = math.exp(report.m2_prime_log_C)
    p1 = math.exp(report.m2_prime_required[1])
    tight = abs(p1 - 4.0) <= 4.0 * 1e-12
    passed = report.passed and c >= 4.0 - 1e-12 and tight
    return _record(
        4,
        "conditions",
        "sequences",
        passed,
        f"M1={report.log_convex} C'={c:.6g} p1 constraint={p1:.15g} C={math.exp(report.m2_log_C):.6g}",
        m2_prime_C=c,
        m2_prime_p1=p1,
        m2_C=math.exp(report.m2_log_C),
        m3_partial_sum=report.m3_partial_sum,
    )


def check_power_inequalities(ctx: CheckContext) -> CheckRecord:
    report = power_inequalities(ctx.params, 150)
    return _record(
        13,
        "power_inequalities",
        "sequences",
        report.passed,
        f"min slacks {report.superadditive_min_slack:.3g}, {report.convexity_min_slack:.3g}, "
        f"{report.shift_min_slack:.3g}",
        **report.to_dict(),
    )


# associated


def check_point_value(ctx: CheckContext) -> CheckRecord:
    expected = 8.0 - 4.0 * math.log(2.0)
    values, argmax = T_values(REFERENCE_PARAMS, np.array([4.0]))
    p = np.arange(101)
    brute = float(np.max(4.0 * p - np.asarray(log_M(p, REFERENCE_PARAMS))))
    error = max(abs(float(values[0]) - expected), abs(brute - expected))
    passed = error <= 1e-12 and int(argmax[0]) == 2
    return _record(
        1,
        "point_value",
        "associated",
        passed,
        f"T(e^4)={float(values[0]):.15g} argmax={int(argmax[0])} error={error:.3g}",
        value=float(values[0]),
        brute_force=brute,
        argmax=int(argmax[0]),
    )


def check_sandwich(ctx: CheckContext) -> CheckRecord:
    part = fit_sandwich(ctx.params, 200, SANDWICH_TOP)
    return _record(2, "sandwich", "associated", part.passed, part.detail or "fitted A1, A2", **part.constants)


def check_shape_of_T(ctx: CheckContext) -> CheckRecord:
    constants = bound_constants(ctx.params)
    log_k = np.linspace(constants.log_k_min, math.log(SANDWICH_TOP), 200)
    part = check_shape(ctx.params, log_k)
    return _record(3, "shape", "associated", part.passed, part.detail or "convex, monotone", **part.constants)


def check_inequalities(ctx: CheckContext) -> CheckRecord:
    base = ctx.params.with_h(1.0)
    part_a = check_monotone_and_star(base, np.arange(1.0, 21.0), (1.0, 2.0))
    part_b = fit_submultiplicative(base, np.linspace(0.0, math.log(1e6), 60), (1.0, 1.0))
    grid_c = np.exp(np.linspace(math.log(0.1), math.log(100.0), 40))
    part_c = fit_exchange(base, grid_c, grid_c)
    parts = [part_a, part_b, part_c]
    verdicts = " ".join(f"{p.name}={'PASS' if p.passed else 'FAIL'}" for p in parts)
    return _record(
        5,
        "inequalities",
        "associated",
        all(p.passed for p in parts),
        verdicts,
        **{p.name: p.constants for p in parts},
    )


# testfun


def check_norm_embedding(ctx: CheckContext) -> CheckRecord:
    bump = BumpFunction()
    base = REFERENCE_PARAMS
    by_tau = [gevrey_norm(bump, None, base.with_tau(t)).log_value for t in (1.0, 2.0)]
    by_sigma = [
        gevrey_norm(bump, None, GevreyParams(base.tau, s, base.h)).log_value for s in (2.0, 2.5)
    ]
    passed = by_tau[1] <= by_tau[0] and by_sigma[1] <= by_sigma[0]
    return _record(
        15,
        "norm_embedding",
        "testfun",
        passed,
        f"ln norm by tau {by_tau[0]:.6g} >= {by_tau[1]:.6g}, by sigma {by_sigma[0]:.6g} >= {by_sigma[1]:.6g}",
        log_norm_by_tau=by_tau,
        log_norm_by_sigma=by_sigma,
    )


def check_bump_derivatives(ctx: CheckContext) -> CheckRecord:
    rng = np.random.default_rng(ctx.seed + 17)
    bump = BumpFunction()
    n = BUMP_ORACLE_POINTS
    xs = rng.uniform(1.1, 1.9, n) * rng.choice([-1.0, 1.0], n)
    worst_by_order: Dict[str, float] = {}
    for order in BUMP_ORACLE_ORDERS:
        exact = bump.derivative(order, xs)
        # relative error, floored at a fraction of the largest sampled magnitude of this order
        floor = WIRTINGER_FLOOR * float(np.max(np.abs(exact)))
        worst = 0.0
        for x, value in zip(xs, exact):

            def lower(s: float, order: int = order) -> complex:
                return complex(bump.derivative(order - 1, np.array([s]))[0])

            approx, _ = ridders_derivative(lower, float(x), step=1e-3)
            worst = max(worst, abs(value - approx.real) / max(abs(value), floor))
        worst_by_order[str(order)] = worst
    worst = max(worst_by_order.values())
    passed = worst <= ctx.tolerances.oracle
    return _record(
        17,
        "bump_derivative_oracle",
        "testfun",
        passed,
        f"worst relative error {worst:.3g} over orders {BUMP_ORACLE_ORDERS[0]}..{BUMP_ORACLE_ORDERS[-1]} "
        f"at {n} points",
        worst_relative_error=worst,
        worst_by_order=worst_by_order,
    )


# boundary


def check_plemelj(ctx: CheckContext) -> CheckRecord:
    F = inv_z()
    phi = BumpFunction()
    tol = ctx.tolerances.pairing
    quad = QuadratureSpec()
    near = stokes_pairing(F, phi, ctx.params, [0.5], quad)
    far = stokes_pairing(F, phi, ctx.params, [0.9], quad)
    direct = direct_pairing(F, phi, Y=[0.5], tolerance=tol)
    expected = -1j * math.pi * float(phi.value(np.array([0.0]))[0])
    errors = {
        "reference": abs(near.value - expected),
        "direct": abs(near.value - direct.value),
        "Y_independence": abs(near.value - far.value),
    }
    passed = all(e <= tol for e in errors.values()) and direct.converged
    return _record(
        6,
        "plemelj",
        "boundary",
        passed,
        " ".join(f"{k}={v:.3g}" for k, v in errors.items()),
        stokes=near.value,
        direct=direct.value,
        **errors,
    )


def check_dbar_decay(ctx: CheckContext) -> CheckRecord:
    phi = BumpFunction()
    ext = build_extension(phi, ctx.params)
    ts = np.exp(np.linspace(math.log(1e-3), 0.0, 31))
    xs = np.linspace(-2.0, 2.0, 81)
    report = dbar_envelope(ext, [0.5], ts, xs)
    log_norm = gevrey_norm(phi, None, ctx.params).log_value
    bound = extension_envelope(ext, [0.5], ts, xs, log_norm)
    return _record(
        7,
        "dbar_decay",
        "boundary",
        report.passed and bound.passed,
        f"ln B={report.log_constant:.6g} refined={report.refined_log_constant:.6g} stable={report.stable}; "
        f"|Phi| <= A norm with ln A={bound.refined_log_constant:.6g} stable={bound.stable}",
        **report.to_dict(),
        extension=bound.to_dict(),
        log_norm=log_norm,
    )


def check_wirtinger(ctx: CheckContext) -> CheckRecord:
    rng = np.random.default_rng(ctx.seed)
    ext = build_extension(BumpFunction(), ctx.params)
    n = ctx.random_points
    xs = rng.uniform(1.1, 1.9, n) * rng.choice([-1.0, 1.0], n)
    ys = rng.uniform(0.05, 0.5, n)
    worst, worst_at = 0.0, [0.0, 0.0]
    for x, y in zip(xs, ys):
        exact = dbar_extension(ext, complex(x, y), 0)

        def along_x(s: float, y: float = float(y)) -> complex:
            return complex(ext(np.array([s + 1j * y]))[0])

        def along_y(s: float, x: float = float(x)) -> complex:
            return complex(ext(np.array([x + 1j * s]))[0])

        fx, _ = ridders_derivative(along_x, float(x), step=1e-3)
        fy, _ = ridders_derivative(along_y, float(y), step=min(1e-3, y / 4.0))
        approx = 0.5 * (fx + 1j * fy)
        error = abs(exact - approx) / max(abs(exact), WIRTINGER_FLOOR)
        if error > worst:
            worst, worst_at = error, [float(x), float(y)]
    passed = worst <= ctx.tolerances.oracle
    return _record(
        8,
        "wirtinger",
        "boundary",
        passed,
        f"worst relative error {worst:.3g} at x+iy={worst_at}",
        worst_relative_error=worst,
        worst_point=worst_at,
    )


def check_growth(ctx: CheckContext) -> CheckRecord:
    admissible = growth_check(inv_z(), ctx.params, GROWTH_H)
    too_fast = growth_check(exp_inv_z(), ctx.params, GROWTH_H)
    worst_t = float(too_fast.worst.get("t", math.inf))
    # the first term of T gives ln(H k), so 1/z fits with A = 1/H
    limit = math.log(1.0 / GROWTH_H) + 1e-9
    passed = (
        admissible.passed
        and admissible.log_A <= limit
        and not too_fast.passed
        and worst_t <= 1e-2
    )
    return _record(
        11,
        "growth",
        "boundary",
        passed,
        f"1/z ln A={admissible.log_A:.6g} (limit {limit:.6g}); "
        f"exp(1/z) passed={too_fast.passed} worst t={worst_t:.3g}",
        H=GROWTH_H,
        inv_z=admissible.to_dict(),
        exp_inv_z=too_fast.to_dict(),
    )


def check_pairing_linearity(ctx: CheckContext) -> CheckRecord:
    rng = np.random.default_rng(ctx.seed + 29)
    a, b, c1, c2 = (float(v) for v in rng.uniform(-1.0, 1.0, 4))
    phi1 = BumpFunction()
    phi2 = phi1.centered_at(0.5)
    F1, F2 = inv_z(), gaussian_entire()
    tol = ctx.tolerances.pairing
    quad = QuadratureSpec()
    Y = [0.5]

    def stokes(F: Any, phi: Any) -> complex:
        return stokes_pairing(F, phi, ctx.params, Y, quad).value

    def direct(F: Any, phi: Any) -> complex:
        return direct_pairing(F, phi, Y=Y, tolerance=tol).value

    combo = Combination(((a, phi1), (b, phi2)))
    mixed = combine([(c1, F1), (c2, F2)])
    errors: Dict[str, float] = {}
    for method, pair in (("stokes", stokes), ("direct", direct)):
        base = pair(F1, phi1)
        errors[f"{method}_phi"] = abs(pair(F1, combo) - (a * base + b * pair(F1, phi2)))
        errors[f"{method}_F"] = abs(pair(mixed, phi1) - (c1 * base + c2 * pair(F2, phi1)))
    limit = tol * (1.0 + max(abs(a) + abs(b), abs(c1) + abs(c2)))
    passed = all(e <= limit for e in errors.values())
    return _record(
        19,
        "pairing_linearity",
        "boundary",
        passed,
        " ".join(f"{k}={v:.3g}" for k, v in errors.items()) + f" limit={limit:.3g}",
        coefficients={"phi": [a, b], "F": [c1, c2]},
        limit=limit,
        **errors,
    )


def check_support_rule(ctx: CheckContext) -> CheckRecord:
    recorder = RecordingTestFunction(BumpFunction())
    ext = build_extension(recorder, ctx.params)
    xs = np.linspace(-2.0, 2.0, 41)
    ys = np.exp(np.linspace(math.log(1e-3), math.log(0.9), 12))
    violations = 0
    highest: Dict[str, int] = {}

    def count(y: float, shift: int) -> int:
        bases = [max(sum(alpha) - shift, 0) for alpha in recorder.calls]
        return sum(ext.cutoff_scale(n) * y > ext.kappa.r_support for n in bases)

    for y in ys:
        recorder.reset()
        ext.evaluate(xs, [y])
        violations += count(y, 0)
        highest[f"evaluate@{y:.3g}"] = recorder.max_requested_order()
        # dbar differentiates once more in x, so its base order is |alpha| - 1
        recorder.reset()
        ext.dbar(xs, [y], 0)
        violations += count(y, 1)
        highest[f"dbar@{y:.3g}"] = recorder.max_requested_order()
    return _record(
        20,
        "support_rule",
        "boundary",
        violations == 0,
        f"{violations} requests beyond the cutoff support over {ys.size} heights",
        violations=violations,
        highest_order=highest,
    )


def check_series_constant(ctx: CheckContext) -> CheckRecord:
    log_sum, order = extension_series_log_constant(ctx.params, 1)
    return _record(
        18,
        "extension_series",
        "boundary",
        math.isfinite(log_sum),
        f"ln sum={log_sum:.6g} after {order} orders",
        log_sum=log_sum,
        orders=order,
    )


# wavefront


def check_wf_fixtures(ctx: CheckContext) -> CheckRecord:
    cones = default_cones(1)
    step = wf_analyze(heaviside(), WF_POINTS, cones, ctx.params)
    bell = wf_analyze(gaussian(), WF_POINTS, cones, ctx.params)
    expected_step = {((0.0,), "+"), ((0.0,), "-")}
    step_set = set(step.singular_set())
    bell_set = set(bell.singular_set())
    passed = step_set == expected_step and not bell_set
    return _record(
        9,
        "wf_fixtures",
        "wavefront",
        passed,
        f"heaviside singular {sorted(step_set)}; gaussian singular {sorted(bell_set)}",
        heaviside=[list(p) + [c] for p, c in sorted(step_set)],
        gaussian=[list(p) + [c] for p, c in sorted(bell_set)],
    )


def check_dtft_oracle(ctx: CheckContext) -> CheckRecord:
    u = heaviside()
    window = default_window(1)
    spectrum = spectrum_localized(u, (0.0,), window)
    lo, hi = default_band(u)
    xi = spectrum.frequencies[0]
    in_band = np.flatnonzero((np.abs(xi) >= lo) & (np.abs(xi) <= hi))
    picked = in_band[:: max(1, in_band.size // DTFT_BINS)]
    direct = dtft_direct(u, (0.0,), window, xi[picked])
    relative = np.abs(spectrum.values[picked] - direct) / np.abs(direct)
    worst = float(relative.max())
    lhs, rhs = spectrum.parseval_sides()
    parseval = abs(lhs - rhs) / rhs
    passed = worst <= ctx.tolerances.oracle and parseval <= ctx.tolerances.identity
    return _record(
        14,
        "dtft_oracle",
        "wavefront",
        passed,
        f"worst relative error {worst:.3g} over {picked.size} bins; parseval {parseval:.3g}",
        worst_relative_error=worst,
        parseval_relative_error=parseval,
    )


def check_pipeline(ctx: CheckContext) -> CheckRecord:
    verdicts: Dict[str, List[str]] = {}
    contained = True
    for t in (1e-2, 1e-3):
        result = boundary_wf_pipeline(inv_z(), None, [[0.0]], ctx.params, PipelineSampling(t=t))
        verdicts[f"{t:g}"] = sorted(c for _, c in result.report.singular_set())
        contained = contained and result.contained
    stable = len({tuple(v) for v in verdicts.values()}) == 1
    passed = contained and stable and all(v == ["+"] for v in verdicts.values())
    return _record(
        10,
        "pipeline_containment",
        "wavefront",
        passed,
        f"singular cones at x=0 by t: {verdicts}",
        singular_by_t=verdicts,
        contained=contained,
    )


def check_tau_profile(ctx: CheckContext) -> CheckRecord:
    profile = wf_tau_profile(heaviside(), [[0.0]], default_cones(1), ctx.params, [0.5, 1.0, 2.0])
    return _record(
        16,
        "tau_profile",
        "wavefront",
        profile.monotone,
        f"singular by tau {profile.singular}",
        **profile.to_dict(),
    )


# determinism


def check_determinism(ctx: CheckContext) -> CheckRecord:
    config = resolve_config(
        {"subcommand": "assoc", "assoc": {"points": 50, "sandwich_points": 40, "sandwich_top": 1e5}}
    )
    command = AssocCommand()
    digests = []
    with tempfile.TemporaryDirectory() as tmp:
        for run in ("first", "second"):
            writer = ArtifactWriter(Path(tmp) / run)
            command.run(config, writer)
            digests.append(dict(writer.digests))
    passed = digests[0] == digests[1] and bool(digests[0])
    return _record(
        12,
        "determinism",
        "determinism",
        passed,
        f"{len(digests[0])} artifacts, identical={digests[0] == digests[1]}",
        digests=digests[0],
    )


CHECKS: List[CheckSpec] = [
    CheckSpec(1, "point_value", "associated", 0.001, check_point_value),
    CheckSpec(2, "sandwich", "associated", 1.0, check_sandwich),
    CheckSpec(3, "shape", "associated", 1.0, check_shape_of_T),
    CheckSpec(4, "conditions", "sequences", 5.0, check_conditions_reference),
    CheckSpec(5, "inequalities", "associated", 10.0, check_inequalities),
    CheckSpec(6, "plemelj", "boundary", 60.0, check_plemelj),
    CheckSpec(7, "dbar_decay", "boundary", 60.0, check_dbar_decay),
    CheckSpec(8, "wirtinger", "boundary", 30.0, check_wirtinger),
    CheckSpec(9, "wf_fixtures", "wavefront", 10.0, check_wf_fixtures),
    CheckSpec(10, "pipeline_containment", "wavefront", 30.0, check_pipeline),
    CheckSpec(11, "growth", "boundary", 5.0, check_growth),
    CheckSpec(12, "determinism", "determinism", 30.0, check_determinism),
    CheckSpec(13, "power_inequalities", "sequences", 5.0, check_power_inequalities),
    CheckSpec(14, "dtft_oracle", "wavefront", 10.0, check_dtft_oracle),
    CheckSpec(15, "norm_embedding", "testfun", 30.0, check_norm_embedding),
    CheckSpec(16, "tau_profile", "wavefront", 30.0, check_tau_profile),
    CheckSpec(17, "bump_derivative_oracle", "testfun", 30.0, check_bump_derivatives),
    CheckSpec(18, "extension_series", "boundary", 1.0, check_series_constant),
    CheckSpec(19, "pairing_linearity", "boundary", 120.0, check_pairing_linearity),
    CheckSpec(20, "support_rule", "boundary", 10.0, check_support_rule),
]

GROUP_ORDER = ["sequences", "associated", "testfun", "boundary", "wavefront", "determinism"]


def checks_for(group: str) -> List[CheckSpec]:
    return [spec for spec in CHECKS if spec.group == group]
