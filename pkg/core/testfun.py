"""
Compactly supported cutoff functions, their derivative oracle and the extended Gevrey norm.

The cutoff is built from the ramp

    psi(r) = 1 / (1 + exp(g(r))),   g(r) = 1/(R - r) - 1/(r - rho),

equal to 1 for r <= rho and 0 for r >= R. It is the quotient
S(R - r) / (S(R - r) + S(r - rho)) with S(t) = exp(-1/t), hence of Gevrey
class 2. In one dimension the bump is psi(|x - c|); in two dimensions it is
the tensor product of one-dimensional ramps.

Derivatives are Taylor coefficients read off an FFT of psi on a circle in the
complex plane (trapezoidal Cauchy integral). The circle radius is half the
distance to the nearest singularity of the continued ramp: the endpoints rho
and R and the poles where exp(g) = -1.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Any, Dict, List, Optional, Protocol, Sequence, Tuple, Union

import numpy as np
from scipy.special import expit, gammaln

from core.errors import CapabilityError, DataError, NumericalError, ParameterError
from core.params import GevreyParams

logger = logging.getLogger(__name__)

DEFAULT_MAX_ORDER = 60
DEFAULT_NODES = 256
# Pole families n = -_POLE_FAMILIES .. _POLE_FAMILIES; farther poles sit closer
# to the endpoints than the endpoints themselves.
_POLE_FAMILIES = 50
# ln of the smallest positive double, rounded up
_LOG_UNDERFLOW = -745.0

Order = Union[int, Sequence[int]]
Box = Sequence[Tuple[float, float]]


@lru_cache(maxsize=64)
def _ramp_poles(rho: float, R: float) -> np.ndarray:
    """Complex zeros of 1 + exp(g) closest to the ramp interval."""
    n = np.arange(-_POLE_FAMILIES, _POLE_FAMILIES + 1)
    w = (2 * n + 1) * 1j * math.pi
    a = w
    b = 2.0 - w * (R + rho)
    c = w * R * rho - rho - R
    disc = np.sqrt(b * b - 4.0 * a * c)
    poles = np.concatenate(((-b + disc) / (2.0 * a), (-b - disc) / (2.0 * a)))
    poles.setflags(write=False)
    return poles


def _singularity_distance(rho: float, R: float, r: float) -> float:
    poles = _ramp_poles(rho, R)
    return float(min(r - rho, R - r, np.min(np.abs(poles - r))))


def _g(rho: float, R: float, z: Any) -> Any:
    return 1.0 / (R - z) - 1.0 / (z - rho)


def _logistic_of_minus(g: np.ndarray) -> np.ndarray:
    """1 / (1 + exp(g)) for complex g without overflow."""
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        e_neg = np.exp(-g)
        e_pos = np.exp(g)
        return np.where(g.real > 0, e_neg / (1.0 + e_neg), 1.0 / (1.0 + e_pos))


def _negligible(order: int, edge_distance: float) -> bool:
    # Cauchy bound with radius s/2: n! (2/s)^n exp(-1/(2s)) below the smallest double
    s = edge_distance
    if s <= 0:
        return True
    bound = gammaln(order + 1) + order * math.log(2.0 / s) - 0.5 / s
    return bound < _LOG_UNDERFLOW


@lru_cache(maxsize=1 << 16)
def _ramp_derivatives(rho: float, R: float, r: float, max_order: int, n_nodes: int) -> np.ndarray:
    """psi^(n)(r) for n = 0..max_order at a point rho < r < R."""
    out = np.zeros(max_order + 1)
    out[0] = float(expit(-_g(rho, R, r)))
    near_plateau = r - rho <= R - r
    edge = min(r - rho, R - r)
    orders = [n for n in range(1, max_order + 1) if not _negligible(n, edge)]
    if not orders:
        return out

    radius = 0.5 * _singularity_distance(rho, R, r)
    if radius < 1e-300:
        raise NumericalError(f"Cauchy radius underflows at r={r!r}")
    theta = 2.0 * math.pi * np.arange(n_nodes) / n_nodes
    z = r + radius * np.exp(1j * theta)
    g = _g(rho, R, z)
    # near the plateau differentiate 1 - psi, which is small there
    samples = _logistic_of_minus(-g) if near_plateau else _logistic_of_minus(g)
    coefficients = np.fft.fft(samples) / n_nodes
    for n in orders:
        a = float(coefficients[n].real)
        if a == 0.0:
            continue
        log_mag = math.log(abs(a)) + gammaln(n + 1) - n * math.log(radius)
        with np.errstate(over="ignore"):
            value = math.copysign(float(np.exp(log_mag)), a)
        out[n] = -value if near_plateau else value
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class RampProfile:
    """The one-dimensional ramp psi on [rho, R]."""

    rho: float
    R: float
    max_order: int = DEFAULT_MAX_ORDER
    n_nodes: int = DEFAULT_NODES

    def value(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=np.float64)
        out = np.zeros_like(r)
        out[r <= self.rho] = 1.0
        inside = (r > self.rho) & (r < self.R)
        out[inside] = expit(-_g(self.rho, self.R, r[inside]))
        return out

    def derivatives(self, r: float) -> np.ndarray:
        """psi^(n)(r) for n = 0..max_order (read-only)."""
        if r <= self.rho:
            out = np.zeros(self.max_order + 1)
            out[0] = 1.0
            return out
        if r >= self.R:
            return np.zeros(self.max_order + 1)
        return _ramp_derivatives(self.rho, self.R, float(r), self.max_order, self.n_nodes)


def _as_points(x: Any, dimension: int) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if dimension == 1 and arr.ndim <= 1:
        return arr.reshape(-1, 1)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.shape[-1] != dimension:
        raise ParameterError(f"points must have {dimension} coordinates, got shape {arr.shape}")
    return arr


def _as_order(order: Order, dimension: int) -> Tuple[int, ...]:
    alpha = (int(order),) if np.isscalar(order) else tuple(int(a) for a in order)  # type: ignore[arg-type]
    if len(alpha) != dimension:
        raise ParameterError(f"order {order} does not match dimension {dimension}")
    if any(a < 0 for a in alpha):
        raise ParameterError(f"order components must be >= 0, got {alpha}")
    return alpha


class OracleFunction(Protocol):
    """A compactly supported function with a partial-derivative oracle."""

    @property
    def dimension(self) -> int: ...

    @property
    def max_order(self) -> int: ...

    def value(self, x: Any) -> np.ndarray: ...

    def derivative(self, order: Order, x: Any) -> np.ndarray: ...

    def support_box(self) -> List[Tuple[float, float]]: ...

    def breakpoints(self, axis: int) -> List[float]: ...


@dataclass(frozen=True)
class BumpFunction:
    """
    Cutoff equal to 1 on the closed plateau ball and 0 outside the support ball.

    In two dimensions the bump is the tensor product of ramps with per-axis
    support r_support/sqrt(2), so its support square fits in the support ball
    and its plateau square contains the plateau ball.

    Attributes:
        center: Center point (one or two coordinates)
        r_plateau: Plateau radius
        r_support: Support radius, larger than r_plateau
        max_order: Highest derivative order served by the oracle
        n_nodes: Trapezoidal nodes on the Cauchy circle
    """

    center: Tuple[float, ...] = (0.0,)
    r_plateau: float = 1.0
    r_support: float = 2.0
    max_order: int = DEFAULT_MAX_ORDER
    n_nodes: int = DEFAULT_NODES

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if len(self.center) not in (1, 2):
            raise ParameterError(f"bump dimension must be 1 or 2, got {len(self.center)}")
        if not (0.0 < self.r_plateau < self.r_support) or not math.isfinite(self.r_support):
            raise ParameterError(
                f"need 0 < r_plateau < r_support, got {self.r_plateau}, {self.r_support}"
            )
        if self.dimension == 2 and not self.r_plateau < self.axis_support:
            raise ParameterError(
                "two-dimensional bumps need r_plateau < r_support/sqrt(2), "
                f"got {self.r_plateau} and {self.r_support}"
            )
        if not 0 <= self.max_order < self.n_nodes // 2:
            raise ParameterError(
                f"max_order must lie in [0, n_nodes/2), got {self.max_order} with {self.n_nodes} nodes"
            )

    @property
    def dimension(self) -> int:
        return len(self.center)

    @property
    def axis_support(self) -> float:
        return self.r_support if self.dimension == 1 else self.r_support / math.sqrt(2.0)

    @property
    def profile(self) -> RampProfile:
        return RampProfile(self.r_plateau, self.axis_support, self.max_order, self.n_nodes)

    def centered_at(self, point: Sequence[float]) -> "BumpFunction":
        return replace(self, center=tuple(float(p) for p in np.atleast_1d(point)))

    def support_box(self) -> List[Tuple[float, float]]:
        a = self.axis_support
        return [(c - a, c + a) for c in self.center]

    def breakpoints(self, axis: int) -> List[float]:
        c, a, rho = self.center[axis], self.axis_support, self.r_plateau
        return [c - a, c - rho, c + rho, c + a]

    def value(self, x: Any) -> np.ndarray:
        pts = _as_points(x, self.dimension)
        profile = self.profile
        out = np.ones(pts.shape[0])
        for j, c in enumerate(self.center):
            out *= profile.value(np.abs(pts[:, j] - c))
        return out

    def axis_derivatives(self, u: np.ndarray, upto: int) -> np.ndarray:
        """d^n/du^n psi(|u|) for n = 0..upto, one row per entry of ``u``."""
        u = np.asarray(u, dtype=np.float64).ravel()
        unique, inverse = np.unique(u, return_inverse=True)
        profile = self.profile
        table = np.empty((unique.size, upto + 1))
        parity = (-1.0) ** np.arange(upto + 1)
        for i, ui in enumerate(unique):
            row = profile.derivatives(abs(float(ui)))[: upto + 1]
            table[i] = row * parity if ui < 0 else row
        return table[inverse]

    def derivative(self, order: Order, x: Any) -> np.ndarray:
        alpha = _as_order(order, self.dimension)
        if sum(alpha) > self.max_order:
            raise CapabilityError(
                f"derivative order {sum(alpha)} exceeds the oracle limit {self.max_order}"
            )
        pts = _as_points(x, self.dimension)
        out = np.ones(pts.shape[0])
        for j, (c, a) in enumerate(zip(self.center, alpha)):
            out *= self.axis_derivatives(pts[:, j] - c, a)[:, a]
        return out


@dataclass(frozen=True)
class Combination:
    """Finite linear combination sum_i c_i f_i of test functions."""

    terms: Tuple[Tuple[float, Any], ...]

    def __post_init__(self) -> None:
        if not self.terms:
            raise ParameterError("a combination needs at least one term")
        dims = {fn.dimension for _, fn in self.terms}
        if len(dims) != 1:
            raise ParameterError(f"combined functions disagree on dimension: {sorted(dims)}")

    @property
    def dimension(self) -> int:
        return self.terms[0][1].dimension

    @property
    def max_order(self) -> int:
        return min(fn.max_order for _, fn in self.terms)

    def value(self, x: Any) -> np.ndarray:
        return sum(c * fn.value(x) for c, fn in self.terms)  # type: ignore[return-value]

    def derivative(self, order: Order, x: Any) -> np.ndarray:
        return sum(c * fn.derivative(order, x) for c, fn in self.terms)  # type: ignore[return-value]

    def support_box(self) -> List[Tuple[float, float]]:
        boxes = [fn.support_box() for _, fn in self.terms]
        return [
            (min(b[j][0] for b in boxes), max(b[j][1] for b in boxes))
            for j in range(self.dimension)
        ]

    def breakpoints(self, axis: int) -> List[float]:
        points = {p for _, fn in self.terms for p in fn.breakpoints(axis)}
        return sorted(points)


@dataclass
class RecordingTestFunction:
    """Wraps a test function and records every derivative order requested."""

    inner: Any
    calls: List[Tuple[int, ...]] = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return self.inner.dimension

    @property
    def max_order(self) -> int:
        return self.inner.max_order

    def value(self, x: Any) -> np.ndarray:
        return self.inner.value(x)

    def derivative(self, order: Order, x: Any) -> np.ndarray:
        self.calls.append(_as_order(order, self.dimension))
        return self.inner.derivative(order, x)

    def support_box(self) -> List[Tuple[float, float]]:
        return self.inner.support_box()

    def breakpoints(self, axis: int) -> List[float]:
        return self.inner.breakpoints(axis)

    def max_requested_order(self) -> int:
        return max((sum(alpha) for alpha in self.calls), default=-1)

    def reset(self) -> None:
        self.calls.clear()


def bump_eval(bump: BumpFunction, x: Any) -> float:
    """Value of the bump at a single point."""
    return float(bump.value(x)[0])


def bump_derivative(bump: BumpFunction, order: Order, x: Any) -> float:
    """Partial derivative of the given order at a single point."""
    return float(bump.derivative(order, x)[0])


def multi_indices(order: int, dimension: int) -> List[Tuple[int, ...]]:
    """Multi-indices of total ``order`` in lexicographic order."""
    if dimension == 1:
        return [(order,)]
    return [(a, order - a) for a in range(order + 1)]


def log_weight(params: GevreyParams, order: int) -> float:
    """ln(h^{n^sigma} n^{tau n^sigma}) with the n = 0 weight equal to 1."""
    if order == 0:
        return 0.0
    ns = float(order) ** params.sigma
    return ns * params.log_h + params.tau * ns * math.log(order)


@dataclass
class NormReport:
    """
    Result of gevrey_norm.

    Attributes:
        value: max over orders of the per-order ratio
        log_value: ln(value), finite even when value underflows
        alpha_max_used: Highest total order included
        stabilized: Running max unchanged over the last quarter of orders
        per_order_ratios: Total order -> max ratio over the grid and that order
        x_grid_density: Grid points per axis
        worst_order: Order attaining the value
    """

    value: float
    log_value: float
    alpha_max_used: int
    stabilized: bool
    per_order_ratios: Dict[int, float]
    x_grid_density: int
    worst_order: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "log_value": self.log_value,
            "alpha_max_used": self.alpha_max_used,
            "stabilized": self.stabilized,
            "x_grid_density": self.x_grid_density,
            "worst_order": self.worst_order,
            "per_order_ratios": {str(n): r for n, r in self.per_order_ratios.items()},
        }


def _box_grid(box: Box, density: int) -> np.ndarray:
    axes = [np.linspace(lo, hi, density) for lo, hi in box]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def gevrey_norm(
    phi: Any,
    K: Optional[Box],
    params: GevreyParams,
    alpha_max: int = 20,
    x_grid_density: Optional[int] = None,
) -> NormReport:
    """
    Extended Gevrey norm sup_alpha sup_K |d^alpha phi| / (h^{|alpha|^sigma} |alpha|^{tau |alpha|^sigma}).

    Args:
        phi: Test function with a derivative oracle
        K: Box [(lo, hi), ...]; defaults to phi's support box
        params: (tau, sigma, h)
        alpha_max: Highest total order
        x_grid_density: Grid points per axis (512 in one dimension, 64 in two)

    Returns:
        NormReport

    Raises:
        ParameterError: If alpha_max < 1 or the density is below 2
        DataError: If a derivative value is not finite
    """
    if alpha_max < 1:
        raise ParameterError(f"alpha_max must be >= 1, got {alpha_max}")
    if x_grid_density is None:
        x_grid_density = 512 if phi.dimension == 1 else 64
    if x_grid_density < 2:
        raise ParameterError(f"x_grid_density must be >= 2, got {x_grid_density}")
    box = list(K) if K is not None else phi.support_box()
    points = _box_grid(box, x_grid_density)

    log_ratios = np.full(alpha_max + 1, -math.inf)
    for n in range(alpha_max + 1):
        weight = log_weight(params, n)
        for alpha in multi_indices(n, phi.dimension):
            values = phi.derivative(alpha, points)
            bad = ~np.isfinite(values)
            if np.any(bad):
                where = points[int(np.flatnonzero(bad)[0])]
                raise DataError(f"non-finite derivative of order {alpha} at x={where.tolist()}")
            peak = float(np.max(np.abs(values)))
            if peak > 0.0:
                log_ratios[n] = max(log_ratios[n], math.log(peak) - weight)

    running = np.maximum.accumulate(log_ratios)
    quarter = max(1, math.ceil((alpha_max + 1) / 4))
    stabilized = bool(running[-1] == running[alpha_max - quarter])
    worst = int(np.argmax(log_ratios))
    log_value = float(running[-1])
    logger.debug(f"norm for {params.to_dict()}: ln value {log_value:.6g} at order {worst}")
    return NormReport(
        value=math.exp(log_value) if log_value > -math.inf else 0.0,
        log_value=log_value,
        alpha_max_used=alpha_max,
        stabilized=stabilized,
        per_order_ratios={
            n: (math.exp(r) if r > -math.inf else 0.0) for n, r in enumerate(log_ratios)
        },
        x_grid_density=x_grid_density,
        worst_order=worst,
    )
