"""
Least-upper-envelope fitting of inequality constants on grids.

A claimed bound ``f(x) <= c + g(x)`` is fitted by the smallest ``c`` that makes
it hold at every grid point, i.e. the maximum of the residual ``f - g``. When
the residual can be evaluated between grid points, each discrete local maximum
is polished with a bounded scalar search so the constant also holds on denser
grids over the same range.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize_scalar

logger = logging.getLogger(__name__)

# Violations are counted only beyond this relative slack.
VIOLATION_RTOL = 1e-9
# Local maxima more than this far below the grid maximum are not polished.
_POLISH_WINDOW = 2.0


@dataclass(frozen=True)
class EnvelopeFit:
    """
    Fitted constant of a one-sided bound.

    Attributes:
        log_constant: Minimal additive constant (log units)
        worst_index: Grid index of the worst residual
        worst_x: Abscissa of the worst residual, after polishing
        polished: Whether the bounded search improved on the grid value
    """

    log_constant: float
    worst_index: int
    worst_x: float
    polished: bool


def upper_envelope(
    xs: np.ndarray,
    residuals: np.ndarray,
    residual_fn: Optional[Callable[[float], float]] = None,
) -> EnvelopeFit:
    """
    Minimal c with residual(x) <= c on the grid.

    Args:
        xs: Increasing abscissae
        residuals: residual values at ``xs``
        residual_fn: Optional scalar residual for polishing between grid points

    Returns:
        EnvelopeFit; log_constant is +inf if any residual is non-finite
    """
    xs = np.asarray(xs, dtype=np.float64)
    residuals = np.asarray(residuals, dtype=np.float64)
    if not np.all(np.isfinite(residuals)):
        bad = int(np.flatnonzero(~np.isfinite(residuals))[0])
        return EnvelopeFit(math.inf, bad, float(xs[bad]), False)

    worst = int(np.argmax(residuals))
    best, best_x, polished = float(residuals[worst]), float(xs[worst]), False
    if residual_fn is None or xs.size < 3:
        return EnvelopeFit(best, worst, best_x, polished)

    n = xs.size
    for j in range(n):
        left = residuals[j - 1] if j > 0 else -math.inf
        right = residuals[j + 1] if j < n - 1 else -math.inf
        if residuals[j] < left or residuals[j] < right:
            continue
        if residuals[j] < best - _POLISH_WINDOW:
            continue
        lo, hi = xs[max(j - 1, 0)], xs[min(j + 1, n - 1)]
        result = minimize_scalar(
            lambda x: -residual_fn(x),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-10 * max(1.0, abs(hi))},
        )
        value = -float(result.fun)
        if value > best:
            best, best_x, worst, polished = value, float(result.x), j, True
    if polished:
        logger.debug(f"envelope polished to {best:.12g} at x={best_x:.6g}")
    return EnvelopeFit(best, worst, best_x, polished)


def lower_envelope(
    xs: np.ndarray,
    residuals: np.ndarray,
    residual_fn: Optional[Callable[[float], float]] = None,
) -> EnvelopeFit:
    """Maximal c with residual(x) >= c on the grid (mirror of upper_envelope)."""
    negated = None if residual_fn is None else (lambda x: -residual_fn(x))
    fit = upper_envelope(xs, -np.asarray(residuals, dtype=np.float64), negated)
    return EnvelopeFit(-fit.log_constant, fit.worst_index, fit.worst_x, fit.polished)


def count_violations(lhs: np.ndarray, rhs: np.ndarray, rtol: float = VIOLATION_RTOL) -> int:
    """Number of points with lhs > rhs beyond a relative slack."""
    lhs = np.asarray(lhs, dtype=np.float64)
    rhs = np.asarray(rhs, dtype=np.float64)
    scale = np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
    return int(np.count_nonzero(lhs - rhs > rtol * scale))


def doubling_detected(log_constants: np.ndarray) -> bool:
    """True when the fitted constant at least doubles at every refinement step."""
    steps = np.diff(np.asarray(log_constants, dtype=np.float64))
    return bool(steps.size > 0 and np.all(steps >= math.log(2.0)))


def log_grid(lo: float, hi: float, n: int) -> np.ndarray:
    """n points uniformly spaced in ln between lo and hi (both > 0)."""
    return np.exp(np.linspace(math.log(lo), math.log(hi), n))
