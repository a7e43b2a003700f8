"""
Almost-analytic extensions of test functions and boundary-value pairings.

For a test function phi the extension is the finite sum

    Phi(x + iy) = sum_alpha d^alpha phi(x) / |alpha|^{tau |alpha|} (iy)^alpha kappa(4 h m_|alpha| y)

over the orders whose cutoff kappa(4 h m y) is not identically zero at y.
Pairings <F(x + i0), phi> are computed by the Stokes identity

    <F(x + i0), phi> = int F Phi (x + iY) dx + 2i sum_j Y_j int_0^1 int F dbar_j Phi (x + itY) dx dt

and, independently, by extrapolating int F(x + itY) phi(x) dx to t = 0.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, optimize
from scipy.special import gammaln, logsumexp

from core.associated import T_values
from core.cones import pairing_direction
from core.errors import CapabilityError, DomainError, NumericalError, ParameterError
from core.fitting import doubling_detected
from core.params import GevreyParams
from core.quadrature import (
    QuadratureSpec,
    dyadic_breakpoints,
    neville_to_zero,
    panel_rule,
    subdivide,
)
from core.sequences import log_m
from core.testfun import BumpFunction, multi_indices
from core.tube import TubeFunction

logger = logging.getLogger(__name__)

# Safety factor on the [0, t_min] remainder bound.
_REMAINDER_FACTOR = 2.0
_DEFAULT_T_SEQUENCE = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5)
_MAX_ENUMERATED_ORDER = 200


def _coefficient(params: GevreyParams, n: int) -> float:
    # 1 / n^{tau n}, with 0^0 = 1
    return 1.0 if n == 0 else math.exp(-params.tau * n * math.log(n))


def _monomial(y: np.ndarray, alpha: Tuple[int, ...]) -> float:
    return float(np.prod([yj**a for yj, a in zip(y, alpha)]))


class DerivativeTable:
    """Lazily computed d^alpha phi on a fixed set of points."""

    def __init__(self, phi: Any, points: np.ndarray) -> None:
        self.phi = phi
        self.points = points
        self._cache: Dict[Tuple[int, ...], np.ndarray] = {}

    def __getitem__(self, alpha: Tuple[int, ...]) -> np.ndarray:
        if alpha not in self._cache:
            self._cache[alpha] = np.asarray(self.phi.derivative(alpha, self.points), dtype=np.float64)
        return self._cache[alpha]


@dataclass
class AlmostAnalyticExtension:
    """
    The extension Phi of a test function.

    Attributes:
        phi: Test function with a derivative oracle
        params: (tau, sigma, h)
        kappa: Cutoff, centered at the origin, of the same dimension as phi
    """

    phi: Any
    params: GevreyParams
    kappa: BumpFunction
    _log_m_cache: Dict[int, float] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if self.kappa.dimension != self.phi.dimension:
            raise ParameterError(
                f"kappa is {self.kappa.dimension}-dimensional, phi {self.phi.dimension}-dimensional"
            )
        if any(c != 0.0 for c in self.kappa.center):
            raise ParameterError("kappa must be centered at the origin")

    @property
    def dimension(self) -> int:
        return int(self.phi.dimension)

    def log_m(self, n: int) -> float:
        if n not in self._log_m_cache:
            self._log_m_cache[n] = float(log_m(n, self.params))
        return self._log_m_cache[n]

    def cutoff_scale(self, n: int) -> float:
        return 4.0 * self.params.h * math.exp(self.log_m(n))

    def order_bound(self, y_norm: float) -> int:
        """Largest n whose cutoff kappa(4 h m_n y) can be nonzero at |y| = y_norm."""
        if y_norm == 0.0:
            return 0
        # kappa vanishes beyond its support radius: 4 h m_n |y| < r_support
        limit = math.log(self.kappa.r_support / (4.0 * self.params.h * y_norm))
        n = 0
        while n < _MAX_ENUMERATED_ORDER and self.log_m(n + 1) <= limit:
            n += 1
        return n

    def _require(self, order: int, y_norm: float) -> None:
        if order > self.phi.max_order:
            raise CapabilityError(
                f"|y|={y_norm:.3g} needs derivatives of phi up to order {order}, "
                f"the oracle serves {self.phi.max_order}"
            )

    def _active_orders(self, y: np.ndarray) -> List[Tuple[int, float, float]]:
        """(n, kappa value, scale) for the orders whose cutoff is active at y."""
        y_norm = float(np.linalg.norm(y))
        active = []
        for n in range(self.order_bound(y_norm) + 1):
            scale = self.cutoff_scale(n)
            active.append((n, float(self.kappa.value(scale * y)[0]), scale))
        return active

    def evaluate(self, x: Any, y: Sequence[float], table: Optional[DerivativeTable] = None) -> np.ndarray:
        """Phi(x + iy) at every row of ``x`` for one imaginary part ``y``."""
        yv = np.asarray(y, dtype=np.float64).reshape(-1)
        table = table if table is not None else DerivativeTable(self.phi, np.asarray(x))
        n_points = np.asarray(table.points).shape[0]
        self._require(self.order_bound(float(np.linalg.norm(yv))), float(np.linalg.norm(yv)))
        total = np.zeros(n_points, dtype=np.complex128)
        for n, kap, _ in self._active_orders(yv):
            if kap == 0.0:
                continue
            factor = _coefficient(self.params, n) * (1j**n) * kap
            for alpha in multi_indices(n, self.dimension):
                total += factor * _monomial(yv, alpha) * table[alpha]
        return total

    def dbar(
        self, x: Any, y: Sequence[float], j: int, table: Optional[DerivativeTable] = None
    ) -> np.ndarray:
        """Wirtinger derivative (d/dx_j + i d/dy_j) Phi / 2 at every row of ``x``."""
        yv = np.asarray(y, dtype=np.float64).reshape(-1)
        if not 0 <= j < self.dimension:
            raise ParameterError(f"coordinate index {j} out of range")
        table = table if table is not None else DerivativeTable(self.phi, np.asarray(x))
        n_points = np.asarray(table.points).shape[0]
        y_norm = float(np.linalg.norm(yv))
        self._require(self.order_bound(y_norm) + 1, y_norm)
        unit = tuple(1 if k == j else 0 for k in range(self.dimension))
        total = np.zeros(n_points, dtype=np.complex128)
        for n, kap, scale in self._active_orders(yv):
            grad = float(self.kappa.derivative(unit, scale * yv)[0])
            if kap == 0.0 and grad == 0.0:
                continue
            c = _coefficient(self.params, n)
            for alpha in multi_indices(n, self.dimension):
                ya = _monomial(yv, alpha)
                d_alpha = table[alpha]
                # S1: x-derivative of phi's coefficient
                if kap != 0.0:
                    shifted = tuple(a + u for a, u in zip(alpha, unit))
                    total += c * (1j**n) * ya * kap * table[shifted]
                # S2: y-derivative of the monomial
                if alpha[j] > 0 and kap != 0.0:
                    lowered = tuple(a - u for a, u in zip(alpha, unit))
                    total += c * (1j ** (n + 1)) * alpha[j] * _monomial(yv, lowered) * kap * d_alpha
                # S3: y-derivative of the cutoff
                if grad != 0.0:
                    total += c * (1j ** (n + 1)) * ya * scale * grad * d_alpha
        return 0.5 * total

    def __call__(self, z: Any) -> np.ndarray:
        """Phi at arbitrary complex points (grouped by imaginary part)."""
        pts = _complex_points(z, self.dimension)
        out = np.empty(pts.shape[0], dtype=np.complex128)
        ys, inverse = np.unique(pts.imag, axis=0, return_inverse=True)
        for k, y in enumerate(ys):
            rows = np.flatnonzero(inverse.reshape(-1) == k)
            out[rows] = self.evaluate(pts.real[rows], y)
        return out


def _complex_points(z: Any, dimension: int) -> np.ndarray:
    arr = np.asarray(z, dtype=np.complex128)
    return arr.reshape(-1, 1) if dimension == 1 else arr.reshape(-1, dimension)


def build_extension(phi: Any, params: GevreyParams, kappa: Optional[BumpFunction] = None) -> AlmostAnalyticExtension:
    """Extension of phi with the default cutoff (plateau 1, support 2) unless one is given."""
    if kappa is None:
        kappa = BumpFunction(center=tuple(0.0 for _ in range(phi.dimension)))
    return AlmostAnalyticExtension(phi=phi, params=params, kappa=kappa)


def dbar_extension(ext: AlmostAnalyticExtension, z: Any, j: int = 0) -> complex:
    """dbar_j Phi at a single complex point."""
    pts = _complex_points(z, ext.dimension)
    if pts.shape[0] != 1:
        raise ParameterError("dbar_extension evaluates one point; use ext.dbar for grids")
    return complex(ext.dbar(pts.real, pts.imag[0], j)[0])


@dataclass
class PairingResult:
    """
    Stokes-formula pairing.

    Attributes:
        value: surface + volume
        quadrature_error_estimate: Order-doubling difference plus the [0, t_min] bound
        surface: int F Phi (x + iY) dx
        volume: 2i sum_j Y_j int int F dbar_j Phi
        refinements: Panel doublings used
        remainder_bound: Bound on the omitted [0, t_min] slab
    """

    value: complex
    quadrature_error_estimate: float
    surface: complex
    volume: complex
    refinements: int = 0
    remainder_bound: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": [self.value.real, self.value.imag],
            "quadrature_error_estimate": self.quadrature_error_estimate,
            "surface": [self.surface.real, self.surface.imag],
            "volume": [self.volume.real, self.volume.imag],
            "refinements": self.refinements,
            "remainder_bound": self.remainder_bound,
        }


def _x_rule(phi: Any, F: TubeFunction, parts: int, order: int) -> Tuple[np.ndarray, np.ndarray]:
    box = phi.support_box()
    axes_nodes, axes_weights = [], []
    for axis, (lo, hi) in enumerate(box):
        cuts = [lo, hi] + [p for p in phi.breakpoints(axis) if lo < p < hi]
        if F.dimension == 1:
            cuts += [p for p in F.singular_points if lo < p < hi]
        nodes, weights = panel_rule(subdivide(sorted(cuts), parts), order)
        axes_nodes.append(nodes)
        axes_weights.append(weights)
    mesh = np.meshgrid(*axes_nodes, indexing="ij")
    wmesh = np.meshgrid(*axes_weights, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=1)
    weights = np.prod(np.stack([w.ravel() for w in wmesh], axis=1), axis=1)
    return points, weights


def _t_breakpoints(ext: AlmostAnalyticExtension, Y: np.ndarray, t_min: float) -> np.ndarray:
    """Dyadic points on [t_min, 1] plus the t where a cutoff switches on or off."""
    points = list(dyadic_breakpoints(t_min, 1.0))
    rho, a = ext.kappa.r_plateau, ext.kappa.axis_support
    y_abs = np.abs(Y) if ext.dimension > 1 else np.array([float(np.linalg.norm(Y))])
    for n in range(_MAX_ENUMERATED_ORDER):
        scale = ext.cutoff_scale(n)
        candidates = [r / (scale * yj) for yj in y_abs if yj > 0 for r in (rho, a)]
        points += [t for t in candidates if t_min < t < 1.0]
        if all(c < t_min for c in candidates):
            break
    return np.unique(points)


def _stokes_once(
    F: TubeFunction, ext: AlmostAnalyticExtension, Y: np.ndarray, quad: QuadratureSpec, order: int, level: int
) -> Tuple[complex, complex, float]:
    x_pts, x_w = _x_rule(ext.phi, F, quad.x_subpanels * 2**level, order)
    table = DerivativeTable(ext.phi, x_pts)
    t_edges = subdivide(_t_breakpoints(ext, Y, quad.t_min), 2**level)
    t_nodes, t_w = panel_rule(t_edges, order)

    def z_at(t: float) -> np.ndarray:
        return x_pts + 1j * t * Y[None, :]

    surface = complex(np.sum(x_w * F(z_at(1.0)) * ext.evaluate(x_pts, Y, table)))

    def slab(t: float) -> complex:
        f_vals = F(z_at(t))
        inner = 0.0 + 0.0j
        for j in range(ext.dimension):
            if Y[j] != 0.0:
                inner += Y[j] * np.sum(x_w * f_vals * ext.dbar(x_pts, t * Y, j, table))
        return complex(inner)

    volume = 2j * sum(w * slab(t) for t, w in zip(t_nodes, t_w))

    # integrand is bounded near t = 0; bound the omitted slab by its size at t_min
    f_vals = F(z_at(quad.t_min))
    edge = 0.0
    for j in range(ext.dimension):
        if Y[j] != 0.0:
            edge += abs(Y[j]) * np.sum(x_w * np.abs(f_vals * ext.dbar(x_pts, quad.t_min * Y, j, table)))
    remainder = _REMAINDER_FACTOR * 2.0 * quad.t_min * float(edge)
    return surface, complex(volume), remainder


def stokes_pairing(
    F: TubeFunction,
    phi: Any,
    params: GevreyParams,
    Y: Sequence[float],
    quad: Optional[QuadratureSpec] = None,
    kappa: Optional[BumpFunction] = None,
) -> PairingResult:
    """
    <F(x + i0), phi> by the Stokes identity.

    Each level evaluates the surface and volume terms with Gauss-Legendre
    panels of order q and 2q; the difference plus the [0, t_min] bound is the
    error estimate. Panels are doubled up to ``quad.max_refinements`` times.

    Raises:
        DomainError: If Y is not an admissible direction of F's tube
        NumericalError: If the error estimate stays above tolerance
    """
    quad = quad or QuadratureSpec()
    Yv = np.asarray(Y, dtype=np.float64).reshape(-1)
    if Yv.size != F.dimension or not F.admissible_direction(Yv):
        raise DomainError(f"Y={Yv.tolist()} is not in Gamma with |Y| < {F.gamma}")
    ext = build_extension(phi, params, kappa)

    best: Optional[PairingResult] = None
    for level in range(quad.max_refinements + 1):
        s1, v1, _ = _stokes_once(F, ext, Yv, quad, quad.order, level)
        s2, v2, remainder = _stokes_once(F, ext, Yv, quad, 2 * quad.order, level)
        error = abs(s2 - s1) + abs(v2 - v1) + remainder
        best = PairingResult(
            value=s2 + v2,
            quadrature_error_estimate=float(error),
            surface=s2,
            volume=v2,
            refinements=level,
            remainder_bound=remainder,
        )
        logger.debug(f"stokes level {level}: value={best.value:.12g}, error={error:.3g}")
        if error <= quad.tolerance:
            return best
    assert best is not None
    raise NumericalError(
        f"Stokes pairing did not reach tolerance {quad.tolerance:g} "
        f"(estimate {best.quadrature_error_estimate:.3g})",
        partial_value=best.value,
        error_estimate=best.quadrature_error_estimate,
    )


@dataclass
class DirectPairingResult:
    """Limit of int F(x + itY) phi(x) dx as t -> 0, by polynomial extrapolation in t."""

    value: complex
    converged: bool
    t_values: List[float]
    per_t: List[complex]
    extrapolants: List[complex]
    difference: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": [self.value.real, self.value.imag],
            "converged": self.converged,
            "difference": self.difference,
            "trace": [
                {"t": t, "value": [v.real, v.imag], "extrapolant": [e.real, e.imag]}
                for t, v, e in zip(self.t_values, self.per_t, self.extrapolants)
            ],
        }


def _pairing_at(F: TubeFunction, phi: Any, t: float, Y: np.ndarray) -> complex:
    box = phi.support_box()
    opts = {"limit": 500, "epsabs": 1e-13, "epsrel": 1e-12}
    if F.dimension == 1:
        lo, hi = box[0]
        cuts = sorted({p for p in list(F.singular_points) + phi.breakpoints(0) if lo < p < hi})

        def part(fn: Callable[[complex], float]) -> float:
            def integrand(x: float) -> float:
                return fn(complex(F(np.array([x + 1j * t * Y[0]]))[0]) * float(phi.value(np.array([x]))[0]))

            value, _ = integrate.quad(integrand, lo, hi, points=cuts or None, **opts)
            return float(value)

        return complex(part(lambda v: v.real), part(lambda v: v.imag))

    ranges = [list(b) for b in box]

    def part2(fn: Callable[[complex], float]) -> float:
        def integrand(x1: float, x2: float) -> float:
            z = np.array([[x1 + 1j * t * Y[0], x2 + 1j * t * Y[1]]])
            return fn(complex(F(z)[0])) * float(phi.value(np.array([[x1, x2]]))[0])

        value, _ = integrate.nquad(integrand, ranges, opts={"limit": 200, "epsabs": 1e-12})
        return float(value)

    return complex(part2(lambda v: v.real), part2(lambda v: v.imag))


def direct_pairing(
    F: TubeFunction,
    phi: Any,
    t_sequence: Sequence[float] = _DEFAULT_T_SEQUENCE,
    Y: Optional[Sequence[float]] = None,
    tolerance: float = 1e-6,
) -> DirectPairingResult:
    """
    Extrapolate int F(x + itY) phi(x) dx to t = 0.

    Convergence is declared only when the last two extrapolants agree to
    ``tolerance``; otherwise the trace is returned with converged=False.

    Raises:
        ParameterError: If t_sequence is not strictly decreasing and positive
        DomainError: If some t|Y| leaves the tube
    """
    ts = [float(t) for t in t_sequence]
    if len(ts) < 2 or any(t <= 0 for t in ts) or any(b >= a for a, b in zip(ts, ts[1:])):
        raise ParameterError("t_sequence must be strictly decreasing positive reals (length >= 2)")
    Yv = (
        pairing_direction(F.Gamma, 0.5) if Y is None else np.asarray(Y, dtype=np.float64).reshape(-1)
    )
    if not F.admissible_direction(ts[0] * Yv):
        raise DomainError(f"t*Y leaves the tube for t={ts[0]}")
    per_t = [_pairing_at(F, phi, t, Yv) for t in ts]
    extrapolation = neville_to_zero(ts, per_t)
    converged = extrapolation.difference <= tolerance
    if not converged:
        logger.warning(
            f"direct pairing not converged: last extrapolants differ by {extrapolation.difference:.3g}"
        )
    return DirectPairingResult(
        value=extrapolation.value,
        converged=converged,
        t_values=ts,
        per_t=per_t,
        extrapolants=extrapolation.estimates,
        difference=extrapolation.difference,
    )


@dataclass(frozen=True)
class GrowthSampleSpec:
    """
    Sampling of the tube for growth_check.

    Level l uses t on a log grid [t_min / 10^l, t_max] and y = t Y.

    Attributes:
        direction: Y; defaults to the cone axis with length 0.5
        t_max: Largest t
        t_min: Smallest t at level 0
        levels: Number of refinements toward y -> 0
        t_points_per_decade: Log-grid density in t
        x_points: Grid points per axis over U (odd, so the center is sampled)
    """

    direction: Optional[Tuple[float, ...]] = None
    t_max: float = 1.0
    t_min: float = 2e-2
    levels: int = 3
    t_points_per_decade: int = 8
    x_points: int = 201

    def __post_init__(self) -> None:
        if not 0.0 < self.t_min < self.t_max:
            raise ParameterError("need 0 < t_min < t_max")
        if self.levels < 1 or self.t_points_per_decade < 1 or self.x_points < 3:
            raise ParameterError("levels, t_points_per_decade and x_points must be positive")


@dataclass
class GrowthReport:
    """
    Fitted growth constants of a tube function.

    Attributes:
        passed: False when the constant doubles at every refinement
        log_A: ln A at the finest level
        log_A_by_level: ln A per level
        worst: Worst sample at the finest level: x, t, y
        log_power_log_A_by_level: Same fit against the log-power exponent
        log_power_passed: Verdict for the log-power fit
    """

    passed: bool
    log_A: float
    log_A_by_level: List[float]
    worst: Dict[str, Any]
    log_power_log_A_by_level: List[float]
    log_power_passed: bool
    H: float

    @property
    def A(self) -> float:
        return math.exp(self.log_A) if self.log_A < 709 else math.inf

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "H": self.H,
            "A": self.A,
            "log_A": self.log_A,
            "log_A_by_level": self.log_A_by_level,
            "worst": self.worst,
            "log_power_log_A_by_level": self.log_power_log_A_by_level,
            "log_power_passed": self.log_power_passed,
        }


def log_power_exponent(H: float, sigma: float, log_k: np.ndarray) -> np.ndarray:
    """H (ln k / ln ln k)^{1/(sigma-1)} ln k, defined for ln k > 1."""
    lk = np.asarray(log_k, dtype=np.float64)
    return H * (lk / np.log(lk)) ** (1.0 / (sigma - 1.0)) * lk


def _x_grid(F: TubeFunction, n: int) -> np.ndarray:
    axes = [np.linspace(lo, hi, n) for lo, hi in F.U]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _sup_log_abs(F: TubeFunction, x: np.ndarray, y: np.ndarray) -> Tuple[float, np.ndarray]:
    """max over x of ln|F(x + iy)|, refined between grid points in one dimension."""
    values = F.log_abs(x + 1j * y[None, :])
    values = np.where(np.isnan(values), -np.inf, values)
    i = int(np.argmax(values))
    best, where = float(values[i]), x[i]
    if F.dimension == 1 and x.shape[0] >= 3 and math.isfinite(best):
        lo = x[max(i - 1, 0), 0]
        hi = x[min(i + 1, x.shape[0] - 1), 0]
        result = optimize.minimize_scalar(
            lambda s: -float(F.log_abs(np.array([s + 1j * y[0]]))[0]),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-12},
        )
        if -result.fun > best:
            best, where = float(-result.fun), np.array([float(result.x)])
    return best, where


def growth_check(
    F: TubeFunction,
    params: GevreyParams,
    H: float,
    sample_spec: Optional[GrowthSampleSpec] = None,
) -> GrowthReport:
    """
    Minimal A with |F(z)| <= A exp(T_{(2^sigma - 1) tau, sigma, H}(1/|y|)) on the samples.

    The fit is repeated on levels reaching closer to y = 0; if ln A grows by
    at least ln 2 at every step the check FAILs.
    """
    spec = sample_spec or GrowthSampleSpec()
    if H <= 0:
        raise ParameterError(f"H must be positive, got {H}")
    exponent = GevreyParams((2.0**params.sigma - 1.0) * params.tau, params.sigma, H)
    Y = (
        np.asarray(spec.direction, dtype=np.float64)
        if spec.direction is not None
        else pairing_direction(F.Gamma, 0.5)
    )
    y_norm = float(np.linalg.norm(Y))
    x = _x_grid(F, spec.x_points)

    by_level: List[float] = []
    logpower_by_level: List[float] = []
    worst: Dict[str, Any] = {}
    for level in range(spec.levels):
        t_lo = spec.t_min / 10.0**level
        count = max(2, int(math.ceil(math.log10(spec.t_max / t_lo) * spec.t_points_per_decade)) + 1)
        ts = np.exp(np.linspace(math.log(t_lo), math.log(spec.t_max), count))
        log_k = -np.log(ts * y_norm)
        thresholds, _ = T_values(exponent, log_k)
        sups = []
        where = []
        for t in ts:
            value, at = _sup_log_abs(F, x, t * Y)
            sups.append(value)
            where.append(at)
        sup_arr = np.asarray(sups)
        residual = sup_arr - thresholds
        i = int(np.argmax(residual))
        by_level.append(float(residual[i]))
        worst = {"x": np.asarray(where[i]).tolist(), "t": float(ts[i]), "y": (ts[i] * Y).tolist()}

        usable = log_k > 1.0
        if np.any(usable):
            lp = sup_arr[usable] - log_power_exponent(H, params.sigma, log_k[usable])
            logpower_by_level.append(float(np.max(lp)))
        else:
            logpower_by_level.append(-math.inf)

    finite = all(math.isfinite(v) for v in by_level)
    passed = finite and not doubling_detected(np.asarray(by_level))
    lp_finite = all(math.isfinite(v) for v in logpower_by_level)
    lp_passed = lp_finite and not doubling_detected(np.asarray(logpower_by_level))
    if not passed:
        logger.warning(f"growth check failed for {F.name}: worst sample {worst}")
    return GrowthReport(
        passed=passed,
        log_A=by_level[-1],
        log_A_by_level=by_level,
        worst=worst,
        log_power_log_A_by_level=logpower_by_level,
        log_power_passed=lp_passed,
        H=H,
    )


def extension_series_log_constant(params: GevreyParams, dimension: int = 1, max_order: int = 10_000) -> Tuple[float, int]:
    """
    ln sum_alpha h^{|alpha|^sigma - |alpha|} / (2^{|alpha|} |alpha|^{tau0 |alpha|^sigma}).

    tau0 = tau (2^{sigma-1} - 2^{1-sigma}). Terms are summed until they fall
    40 below the running total while decreasing.

    Returns:
        (ln of the sum, last order included)
    """
    s = params.sigma
    tau0 = params.tau * (2.0 ** (s - 1.0) - 2.0 ** (1.0 - s))
    logs = [0.0]
    n = 0
    while n < max_order:
        n += 1
        ns = float(n) ** s
        multiplicity = gammaln(n + dimension) - gammaln(n + 1) - gammaln(dimension)
        term = (ns - n) * params.log_h - n * math.log(2.0) - tau0 * ns * math.log(n) + multiplicity
        logs.append(term)
        if term < logs[-2] and term < float(logsumexp(logs)) - 40.0:
            break
    return float(logsumexp(logs)), n


@dataclass
class EnvelopeReport:
    """
    Envelope constant of a sampled bound and its stability under refinement.

    Attributes:
        log_constant: Fit on the given grid
        refined_log_constant: Fit on the grid with midpoints inserted
        stable: |refined - coarse| < ln 2
        refined_violations: Refined samples above the coarse constant
        worst: t and x of the refined worst sample
    """

    log_constant: float
    refined_log_constant: float
    stable: bool
    refined_violations: int
    worst: Dict[str, Any]

    @property
    def constant(self) -> float:
        return math.exp(self.refined_log_constant) if self.refined_log_constant < 709 else math.inf

    @property
    def passed(self) -> bool:
        return math.isfinite(self.refined_log_constant) and self.stable

    def to_dict(self) -> Dict[str, Any]:
        return {
            "log_constant": self.log_constant,
            "refined_log_constant": self.refined_log_constant,
            "constant": self.constant,
            "stable": self.stable,
            "refined_violations": self.refined_violations,
            "worst": self.worst,
            "passed": self.passed,
        }


def _refine_log(ts: np.ndarray) -> np.ndarray:
    mids = np.sqrt(ts[:-1] * ts[1:])
    return np.sort(np.concatenate((ts, mids)))


def _refine_linear(xs: np.ndarray) -> np.ndarray:
    mids = 0.5 * (xs[:-1] + xs[1:])
    return np.sort(np.concatenate((xs, mids)))


def _envelope(
    sample: Callable[[np.ndarray, np.ndarray], Tuple[np.ndarray, np.ndarray]],
    t_grid: Sequence[float],
    x_grid: Sequence[float],
) -> EnvelopeReport:
    ts = np.sort(np.asarray(t_grid, dtype=np.float64))
    xs = np.sort(np.asarray(x_grid, dtype=np.float64))
    coarse, _ = sample(ts, xs)
    refined_t, refined_x = _refine_log(ts), _refine_linear(xs)
    fine, where = sample(refined_t, refined_x)
    finite_coarse = coarse[np.isfinite(coarse)]
    finite_fine = fine[np.isfinite(fine)]
    c = float(finite_coarse.max()) if finite_coarse.size else -math.inf
    f = float(finite_fine.max()) if finite_fine.size else -math.inf
    if np.any(np.isposinf(coarse)) or np.any(np.isposinf(fine)):
        c = f = math.inf
    stable = math.isfinite(f) and abs(f - c) < math.log(2.0)
    k = int(np.argmax(np.where(np.isfinite(fine), fine, -np.inf)))
    return EnvelopeReport(
        log_constant=c,
        refined_log_constant=f,
        stable=stable,
        refined_violations=int(np.count_nonzero(fine > c + 1e-9 * max(1.0, abs(c)))),
        worst={"t": float(where[k, 0]), "x": float(where[k, 1])},
    )


def dbar_envelope(
    ext: AlmostAnalyticExtension,
    Y: Sequence[float],
    t_grid: Sequence[float],
    x_grid: Sequence[float],
) -> EnvelopeReport:
    """
    Minimal B with |dbar Phi(x + itY)| <= B exp(-T_{(2^sigma - 1) tau, sigma, h}(1/|tY|)).

    ``x_grid`` lists coordinates per axis (the same for every axis in two
    dimensions); |dbar Phi| is the largest component.
    """
    Yv = np.asarray(Y, dtype=np.float64).reshape(-1)
    y_norm = float(np.linalg.norm(Yv))
    exponent = ext.params.shifted_tau(2.0**ext.params.sigma - 1.0)

    def sample(ts: np.ndarray, xs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        pts = np.stack(
            [m.ravel() for m in np.meshgrid(*([xs] * ext.dimension), indexing="ij")], axis=1
        )
        table = DerivativeTable(ext.phi, pts)
        thresholds, _ = T_values(exponent, -np.log(ts * y_norm))
        values = np.empty((ts.size, pts.shape[0]))
        for i, t in enumerate(ts):
            mags = np.max(
                np.stack([np.abs(ext.dbar(pts, t * Yv, j, table)) for j in range(ext.dimension)]),
                axis=0,
            )
            with np.errstate(divide="ignore"):
                values[i] = np.log(mags) + thresholds[i]
        flat = values.ravel()
        where = np.stack([np.repeat(ts, pts.shape[0]), np.tile(pts[:, 0], ts.size)], axis=1)
        return flat, where

    return _envelope(sample, t_grid, x_grid)


def extension_envelope(
    ext: AlmostAnalyticExtension,
    Y: Sequence[float],
    t_grid: Sequence[float],
    x_grid: Sequence[float],
    log_norm: float,
) -> EnvelopeReport:
    """Minimal A_h with |Phi(x + itY)| <= A_h * norm(phi) on the samples."""
    Yv = np.asarray(Y, dtype=np.float64).reshape(-1)

    def sample(ts: np.ndarray, xs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        pts = np.stack(
            [m.ravel() for m in np.meshgrid(*([xs] * ext.dimension), indexing="ij")], axis=1
        )
        table = DerivativeTable(ext.phi, pts)
        values = np.empty((ts.size, pts.shape[0]))
        for i, t in enumerate(ts):
            with np.errstate(divide="ignore"):
                values[i] = np.log(np.abs(ext.evaluate(pts, t * Yv, table))) - log_norm
        where = np.stack([np.repeat(ts, pts.shape[0]), np.tile(pts[:, 0], ts.size)], axis=1)
        return values.ravel(), where

    return _envelope(sample, t_grid, x_grid)
