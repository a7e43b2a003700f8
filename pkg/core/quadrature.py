"""
Quadrature and extrapolation primitives shared by the boundary and testfun modules.

Gauss-Legendre rules on panel partitions, polynomial extrapolation to zero
(Neville tableau) and Ridders' extrapolated finite differences.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, List, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from core.errors import ParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadratureSpec:
    """
    Panel quadrature settings.

    Attributes:
        order: Gauss-Legendre nodes per panel
        x_subpanels: Panels per breakpoint interval on the x axis
        t_min: Lower end of the dyadic t partition
        tolerance: Accepted error estimate
        max_refinements: Panel doublings attempted before giving up
    """

    order: int = 32
    x_subpanels: int = 8
    t_min: float = 1e-6
    tolerance: float = 1e-8
    max_refinements: int = 3

    def __post_init__(self) -> None:
        if self.order < 2:
            raise ParameterError(f"order must be >= 2, got {self.order}")
        if self.x_subpanels < 1:
            raise ParameterError(f"x_subpanels must be >= 1, got {self.x_subpanels}")
        if not 0.0 < self.t_min < 1.0:
            raise ParameterError(f"t_min must lie in (0, 1), got {self.t_min}")
        if self.tolerance <= 0:
            raise ParameterError(f"tolerance must be positive, got {self.tolerance}")
        if self.max_refinements < 0:
            raise ParameterError("max_refinements must be >= 0")


@lru_cache(maxsize=32)
def _reference_rule(order: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def panel_rule(breakpoints: Sequence[float], order: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Composite Gauss-Legendre nodes and weights over consecutive breakpoints.

    Zero-length panels are skipped.
    """
    edges = np.asarray(breakpoints, dtype=np.float64)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) < 0):
        raise ParameterError("breakpoints must be a nondecreasing sequence of length >= 2")
    ref_x, ref_w = _reference_rule(order)
    lo, hi = edges[:-1], edges[1:]
    keep = hi > lo
    lo, hi = lo[keep], hi[keep]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = (mid[:, None] + half[:, None] * ref_x[None, :]).ravel()
    weights = (half[:, None] * ref_w[None, :]).ravel()
    return nodes, weights


def subdivide(breakpoints: Sequence[float], parts: int) -> np.ndarray:
    """Split every interval between consecutive breakpoints into ``parts`` equal panels."""
    edges = np.unique(np.asarray(breakpoints, dtype=np.float64))
    if parts <= 1 or edges.size < 2:
        return edges
    fractions = np.arange(parts) / parts
    inner = edges[:-1, None] + np.diff(edges)[:, None] * fractions[None, :]
    return np.append(inner.ravel(), edges[-1])


def dyadic_breakpoints(t_min: float, t_max: float = 1.0) -> np.ndarray:
    """Breakpoints t_max, t_max/2, ... down to t_min, increasing."""
    if not 0.0 < t_min < t_max:
        raise ParameterError(f"need 0 < t_min < t_max, got {t_min}, {t_max}")
    count = int(math.ceil(math.log2(t_max / t_min)))
    points = t_max * 2.0 ** -np.arange(count + 1, dtype=np.float64)
    points[-1] = t_min
    return np.unique(points)


@dataclass(frozen=True)
class Extrapolation:
    """Neville tableau diagonal for the limit h -> 0."""

    estimates: List[complex]
    difference: float

    @property
    def value(self) -> complex:
        return self.estimates[-1]


def neville_to_zero(steps: Sequence[float], values: Sequence[complex]) -> Extrapolation:
    """
    Polynomial extrapolation of values(h) to h = 0.

    ``estimates[k]`` is the value at 0 of the interpolant through the first
    k + 1 samples; ``difference`` is the gap between the last two.
    """
    h = np.asarray(steps, dtype=np.float64)
    v = np.asarray(values, dtype=np.complex128)
    if h.size != v.size or h.size == 0:
        raise ParameterError("steps and values must be nonempty and of equal length")
    if np.unique(h).size != h.size:
        raise ParameterError("extrapolation steps must be distinct")
    tableau = v.copy()
    estimates = [complex(tableau[0])]
    for level in range(1, h.size):
        # tableau[i] holds the interpolant through samples i - level .. i after this pass
        for i in range(h.size - 1, level - 1, -1):
            lo, hi = h[i - level], h[i]
            tableau[i] = (hi * tableau[i - 1] - lo * tableau[i]) / (hi - lo)
        estimates.append(complex(tableau[level]))
    difference = abs(estimates[-1] - estimates[-2]) if len(estimates) > 1 else math.inf
    return Extrapolation(estimates=estimates, difference=float(difference))


def ridders_derivative(
    fn: Callable[[float], complex],
    x: float,
    step: float = 1e-2,
    shrink: float = 1.4,
    max_levels: int = 12,
) -> Tuple[complex, float]:
    """
    First derivative by Ridders' extrapolated central differences.

    Returns:
        (derivative, error estimate)
    """
    if step <= 0:
        raise ParameterError(f"step must be positive, got {step}")
    shrink2 = shrink * shrink
    table = np.zeros((max_levels, max_levels), dtype=np.complex128)
    h = step
    table[0, 0] = (fn(x + h) - fn(x - h)) / (2.0 * h)
    best, error = complex(table[0, 0]), math.inf
    for i in range(1, max_levels):
        h /= shrink
        table[0, i] = (fn(x + h) - fn(x - h)) / (2.0 * h)
        factor = shrink2
        for j in range(1, i + 1):
            table[j, i] = (table[j - 1, i] * factor - table[j - 1, i - 1]) / (factor - 1.0)
            factor *= shrink2
            candidate = max(
                abs(table[j, i] - table[j - 1, i]), abs(table[j, i] - table[j - 1, i - 1])
            )
            if candidate <= error:
                error, best = float(candidate), complex(table[j, i])
        if abs(table[i, i] - table[i - 1, i - 1]) >= 2.0 * error:
            break
    return best, error
