"""
Grid verifiers for the inequalities satisfied by the associated functions.

Each part returns an ``InequalityPart`` with a verdict, the fitted constants and
the worst grid point. Failing to find a constant is a FAIL verdict, not an
exception. All arguments on the ln k axis are given as ``log_k`` arrays.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.associated import (
    T_eval,
    T_values,
    bound_constants,
    bounds,
    bounds_values,
)
from core.errors import ParameterError
from core.fitting import count_violations, lower_envelope, upper_envelope
from core.params import GevreyParams
from core.sequences import factorial_dominance_log_constant, power_inequalities

logger = logging.getLogger(__name__)

_BISECTION_STEPS = 60
_SANDWICH_TOP = 1e8
# Part c searches ln H on [ln h - 60, ln h + _EXCHANGE_SPAN].
_EXCHANGE_SPAN = 5.0


@dataclass
class InequalityPart:
    """Verdict and fitted constants of one verified inequality."""

    name: str
    passed: bool
    constants: Dict[str, Any] = field(default_factory=dict)
    worst_point: Dict[str, Any] = field(default_factory=dict)
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "constants": self.constants,
            "worst_point": self.worst_point,
            "detail": self.detail,
        }


@dataclass
class InequalityEntry:
    params: GevreyParams
    parts: List[InequalityPart]

    @property
    def passed(self) -> bool:
        return all(part.passed for part in self.parts)

    def part(self, name: str) -> InequalityPart:
        for part in self.parts:
            if part.name == name:
                return part
        raise KeyError(f"no inequality part named '{name}'")


@dataclass
class InequalityReport:
    """Per-parameter results of verify_inequalities."""

    entries: List[InequalityEntry]

    @property
    def passed(self) -> bool:
        return all(entry.passed for entry in self.entries)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "entries": [
                {
                    "params": entry.params.to_dict(),
                    "passed": entry.passed,
                    "parts": [part.to_dict() for part in entry.parts],
                }
                for entry in self.entries
            ],
        }


def _check_grid(name: str, grid: Sequence[float]) -> np.ndarray:
    arr = np.asarray(grid, dtype=np.float64)
    if arr.size == 0 or not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise ParameterError(f"{name} must be a nonempty grid of positive reals")
    return np.sort(arr)


def check_monotone_and_star(
    params: GevreyParams, log_k: np.ndarray, h_pair: Tuple[float, float] = (1.0, 2.0)
) -> InequalityPart:
    """
    Part a: T_{h1} < T_{h2} for h1 < h2, and T <= T* <= T_{C h} with a fitted C.

    Strictness is required wherever the h1 supremum is attained at p >= 1;
    where both suprema are the p = 0 term the values coincide at 0.
    """
    h1, h2 = h_pair
    if not h1 < h2:
        raise ParameterError(f"part a needs h1 < h2, got {h_pair}")
    t1, arg1 = T_values(params.with_h(h1), log_k)
    t2, _ = T_values(params.with_h(h2), log_k)
    margin = t2 - t1
    strict_ok = np.where(arg1 >= 1, margin > 0, margin >= 0)
    worst = int(np.argmin(margin))

    t_base, _ = T_values(params, log_k)
    t_star, _ = T_values(params, log_k, star=True)
    star_ok = count_violations(t_base, t_star) == 0

    log_c_termwise, p_termwise = factorial_dominance_log_constant(params)

    def dominated(log_c: float) -> bool:
        widened, _ = T_values(params.with_h(params.h * math.exp(log_c)), log_k)
        return count_violations(t_star, widened) == 0

    termwise_ok = dominated(log_c_termwise)
    lo, hi = 0.0, log_c_termwise
    if dominated(lo):
        hi = lo
    else:
        for _ in range(_BISECTION_STEPS):
            mid = 0.5 * (lo + hi)
            if dominated(mid):
                hi = mid
            else:
                lo = mid

    passed = bool(np.all(strict_ok)) and star_ok and termwise_ok
    return InequalityPart(
        name="a",
        passed=passed,
        constants={
            "h1": h1,
            "h2": h2,
            "C_termwise": math.exp(log_c_termwise),
            "C_termwise_p": p_termwise,
            "C_fitted": math.exp(hi),
            "H_fitted": params.h * math.exp(hi),
        },
        worst_point={"k": math.exp(log_k[worst]), "margin": float(margin[worst])},
        detail=(
            f"monotone={bool(np.all(strict_ok))}, T<=T*={star_ok}, "
            f"T*<=T_(C h) certified={termwise_ok}"
        ),
    )


def _bounded_tail(residuals: np.ndarray) -> bool:
    # a residual still climbing at the top of the grid suggests no finite constant
    worst = int(np.argmax(residuals))
    return worst < residuals.size - 1 and residuals[-1] <= residuals[-2]


def fit_submultiplicative(
    params: GevreyParams,
    log_k: np.ndarray,
    h_pair: Tuple[float, float] = (1.0, 1.0),
    c_grid: Optional[Sequence[float]] = None,
) -> InequalityPart:
    """
    Part b: T_{h1} + T_{h2} <= T_{tau/2^{sigma-1}, sigma, c} + ln C.

    Scans c upward and keeps the first c whose residual is bounded on the grid,
    then reports the envelope ln C for it.
    """
    c_values = [float(c) for c in (c_grid if c_grid is not None else 2.0 ** np.arange(11))]
    h1, h2 = h_pair
    t1, _ = T_values(params.with_h(h1), log_k)
    t2, _ = T_values(params.with_h(h2), log_k)
    lhs = t1 + t2
    reduced_tau = params.tau / 2.0 ** (params.sigma - 1.0)

    def residual_for(c: float):
        reduced = GevreyParams(reduced_tau, params.sigma, c)
        rhs, _ = T_values(reduced, log_k)

        def residual_fn(lk: float) -> float:
            return (
                T_eval(params.with_h(h1), log_k=lk).value
                + T_eval(params.with_h(h2), log_k=lk).value
                - T_eval(reduced, log_k=lk).value
            )

        return lhs - rhs, residual_fn

    profile: Dict[str, float] = {}
    chosen = None
    last_residuals = None
    # larger c push the maximizing index (and the scan depth) up steeply
    for c in sorted(c_values):
        residuals, residual_fn = residual_for(c)
        last_residuals = residuals
        fit = upper_envelope(log_k, residuals, residual_fn)
        profile[f"{c:g}"] = fit.log_constant
        if _bounded_tail(residuals):
            chosen = (c, fit)
            break

    if chosen is None:
        assert last_residuals is not None
        worst = int(np.argmax(last_residuals))
        return InequalityPart(
            name="b",
            passed=False,
            constants={"log_C_by_c": profile},
            worst_point={"k": math.exp(log_k[worst]), "residual": float(last_residuals[worst])},
            detail="residual grows at the top of the grid for every c",
        )
    c, fit = chosen
    minimal_c = min(profile, key=lambda key: profile[key])
    return InequalityPart(
        name="b",
        passed=math.isfinite(fit.log_constant),
        constants={
            "c": c,
            "C": math.exp(fit.log_constant),
            "log_C": fit.log_constant,
            "log_C_by_c": profile,
            "c_minimal_residual": float(minimal_c),
        },
        worst_point={"k": math.exp(fit.worst_x), "residual": fit.log_constant},
        detail=f"smallest bounded c = {c:g}",
    )


def fit_exchange(
    params: GevreyParams, k_grid: np.ndarray, l_grid: np.ndarray
) -> InequalityPart:
    """
    Part c: largest H with T_H(l) <= T_h(1/k) + k l for all grid pairs (k, l).

    T_H grows with H, so the admissible set is an interval (0, H*] found by
    bisection on ln H.
    """
    t_inverse, _ = T_values(params, -np.log(k_grid))
    rhs = t_inverse[:, None] + k_grid[:, None] * l_grid[None, :]
    best_k = np.argmin(rhs, axis=0)
    rhs_min = rhs[best_k, np.arange(l_grid.size)]
    log_l = np.log(l_grid)

    def admissible(log_H: float) -> bool:
        lhs, _ = T_values(params.with_h(math.exp(log_H)), log_l)
        return count_violations(lhs, rhs_min) == 0

    lo, hi = params.log_h - 60.0, params.log_h + _EXCHANGE_SPAN
    if not admissible(lo):
        return InequalityPart(
            name="c",
            passed=False,
            detail="no H on the search range satisfies the inequality",
        )
    saturated = admissible(hi)
    if saturated:
        lo = hi
    else:
        for _ in range(_BISECTION_STEPS):
            mid = 0.5 * (lo + hi)
            if admissible(mid):
                lo = mid
            else:
                hi = mid
    lhs, _ = T_values(params.with_h(math.exp(lo)), log_l)
    slack = rhs_min - lhs
    j = int(np.argmin(slack))
    return InequalityPart(
        name="c",
        passed=True,
        constants={"H": math.exp(lo), "log_H": lo, "saturated": saturated},
        worst_point={
            "k": float(k_grid[best_k[j]]),
            "l": float(l_grid[j]),
            "slack": float(slack[j]),
        },
        detail="fitted H at the edge of the admissible interval",
    )


def fit_sandwich(
    params: GevreyParams, n_points: int = 200, top: float = _SANDWICH_TOP, densify: int = 10
) -> InequalityPart:
    """
    Fit ln A1, ln A2 with ln A1 + log_lower <= T <= ln A2 + log_upper on [k_min, top].

    The fit uses ``n_points`` log-spaced points; violations are then counted
    on the fitting grid and on a grid ``densify`` times denser.
    """
    constants = bound_constants(params)
    hi = math.log(top)
    if hi <= constants.log_k_min:
        raise ParameterError(f"top={top:g} lies below k_min={constants.k_min:g}")
    log_k = np.linspace(constants.log_k_min, hi, n_points)

    def residuals_on(grid: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        t, _ = T_values(params, grid)
        lower, upper = bounds_values(params, grid)
        return t, lower, upper

    def upper_residual(lk: float) -> float:
        return T_eval(params, log_k=lk).value - bounds(params, log_k=lk)[1]

    def lower_residual(lk: float) -> float:
        return T_eval(params, log_k=lk).value - bounds(params, log_k=lk)[0]

    t, lower, upper = residuals_on(log_k)
    fit_upper = upper_envelope(log_k, t - upper, upper_residual)
    fit_lower = lower_envelope(log_k, t - lower, lower_residual)
    log_a1, log_a2 = fit_lower.log_constant, fit_upper.log_constant

    def violations(grid_t: np.ndarray, grid_lower: np.ndarray, grid_upper: np.ndarray) -> int:
        return count_violations(grid_t, log_a2 + grid_upper) + count_violations(
            log_a1 + grid_lower, grid_t
        )

    on_grid = violations(t, lower, upper)
    dense = np.linspace(constants.log_k_min, hi, n_points * densify)
    on_dense = violations(*residuals_on(dense))
    return InequalityPart(
        name="sandwich",
        passed=on_grid == 0 and on_dense == 0,
        constants={
            "log_A1": log_a1,
            "log_A2": log_a2,
            "A1": math.exp(log_a1),
            "A2": math.exp(log_a2),
            **constants.to_dict(),
        },
        worst_point={
            "k_upper": math.exp(fit_upper.worst_x),
            "k_lower": math.exp(fit_lower.worst_x),
        },
        detail=f"sign flips: grid={on_grid}, dense={on_dense}",
    )


def check_shape(params: GevreyParams, log_k: np.ndarray) -> InequalityPart:
    """Convexity in ln k, monotonicity in k and monotone argmax on a grid."""
    t, argmax = T_values(params, log_k)
    first = np.diff(t)
    second = np.diff(t, 2) if t.size > 2 else np.zeros(0)
    spacing = np.diff(log_k)
    # second differences on a possibly nonuniform grid, scaled to slopes
    slopes = first / spacing
    slope_change = np.diff(slopes)
    min_second = float(slope_change.min()) if slope_change.size else 0.0
    passed = (
        bool(np.all(first >= -1e-12))
        and min_second >= -1e-9
        and bool(np.all(np.diff(argmax) >= 0))
    )
    return InequalityPart(
        name="shape",
        passed=passed,
        constants={
            "min_first_difference": float(first.min()) if first.size else 0.0,
            "min_second_difference": float(second.min()) if second.size else 0.0,
            "min_slope_change": min_second,
            "argmax_monotone": bool(np.all(np.diff(argmax) >= 0)),
        },
    )


def check_power_inequalities(params: GevreyParams, p_max: int = 150) -> InequalityPart:
    report = power_inequalities(params, p_max)
    return InequalityPart(name="simple", passed=report.passed, constants=report.to_dict())


def verify_inequalities(
    params_set: Sequence[GevreyParams],
    k_grid: Sequence[float],
    l_grid: Sequence[float],
    *,
    h_pair: Tuple[float, float] = (1.0, 2.0),
    submultiplicative_k_grid: Optional[Sequence[float]] = None,
    c_grid: Optional[Sequence[float]] = None,
    sandwich_points: int = 200,
    sandwich_top: float = _SANDWICH_TOP,
) -> InequalityReport:
    """
    Verify parts a, b, c, the power inequalities and the sandwich bound.

    Args:
        params_set: Parameter triples to verify
        k_grid: k values for parts a and b (and the k axis of part c)
        l_grid: l values of part c
        h_pair: (h1, h2) of part a
        submultiplicative_k_grid: Separate k grid for part b, if any
        c_grid: Candidate c values of part b (default 2^0..2^10)
        sandwich_points: Fitting-grid size of the sandwich part
        sandwich_top: Upper end of the sandwich range

    Returns:
        InequalityReport with one entry per parameter triple
    """
    ks = _check_grid("k_grid", k_grid)
    ls = _check_grid("l_grid", l_grid)
    kb = ks if submultiplicative_k_grid is None else _check_grid(
        "submultiplicative_k_grid", submultiplicative_k_grid
    )
    entries: List[InequalityEntry] = []
    for params in params_set:
        logger.info(f"verifying inequalities for {params.to_dict()}")
        parts = [
            check_monotone_and_star(params, np.log(ks), h_pair),
            fit_submultiplicative(params, np.log(kb), (params.h, params.h), c_grid),
            fit_exchange(params, ks, ls),
            check_power_inequalities(params),
            fit_sandwich(params, sandwich_points, sandwich_top),
        ]
        for part in parts:
            level = logging.INFO if part.passed else logging.WARNING
            logger.log(level, f"part {part.name}: {'PASS' if part.passed else 'FAIL'} {part.detail}")
        entries.append(InequalityEntry(params=params, parts=parts))
    return InequalityReport(entries=entries)
