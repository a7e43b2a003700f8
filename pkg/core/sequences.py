"""
Log-domain weight sequences and their structural conditions.

The sequence M_p = p^{tau p^sigma} overflows a double already at p = 5 for
tau = 1, sigma = 2, so every quantity here is carried as a natural logarithm.
Conventions: 0^0 := 1, hence log M_0 = 0, and m_0 := 1.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from scipy.special import logsumexp, xlogy

from core.errors import ParameterError
from core.params import GevreyParams

logger = logging.getLogger(__name__)

IndexLike = Union[int, np.ndarray]

# Relative slack tolerated by the "exact" integer-grid inequalities.
_ROUNDING_TOL = 1e-12
# Number of trailing ratios inspected before trusting the geometric tail bound.
_TAIL_WINDOW = 8


def _as_index_array(p: IndexLike) -> np.ndarray:
    arr = np.asarray(p)
    if arr.dtype.kind not in "iu":
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise ParameterError(f"sequence index must be an integer, got {p!r}")
        arr = arr.astype(np.int64)
    if np.any(arr < 0):
        raise ParameterError(f"sequence index must be >= 0, got {p!r}")
    return arr


def log_M(p: IndexLike, params: GevreyParams) -> Any:
    """
    Return ln M_p = tau * p^sigma * ln p (0 for p in {0, 1}).

    Accepts a scalar or an integer array; returns the same shape.
    """
    arr = _as_index_array(p).astype(np.float64)
    values = params.tau * xlogy(arr**params.sigma, arr)
    return float(values) if np.ndim(values) == 0 else values


def log_m(p: IndexLike, params: GevreyParams) -> Any:
    """
    Return ln m_p = tau * ((2p)^{sigma-1} - 1) * ln p, with m_0 := 1.

    m_p sets the shrinking cutoff radius of the order-p terms of the almost
    analytic extension.
    """
    arr = _as_index_array(p).astype(np.float64)
    safe = np.where(arr >= 1, arr, 1.0)
    values = params.tau * ((2.0 * safe) ** (params.sigma - 1.0) - 1.0) * np.log(safe)
    values = np.where(arr >= 1, values, 0.0)
    return float(values) if np.ndim(values) == 0 else values


class SequenceKind(Enum):
    """Which of the two sequences a LogWeightSequence evaluates."""

    M = "M"
    m = "m"


@dataclass(frozen=True)
class LogWeightSequence:
    """p -> ln M_p or p -> ln m_p for fixed parameters."""

    params: GevreyParams
    kind: SequenceKind = SequenceKind.M

    def __call__(self, p: IndexLike) -> Any:
        if self.kind is SequenceKind.M:
            return log_M(p, self.params)
        return log_m(p, self.params)

    def values(self, p_max: int) -> np.ndarray:
        """Values for p = 0..p_max inclusive."""
        return np.asarray(self(np.arange(p_max + 1)), dtype=np.float64)


@dataclass
class ConditionReport:
    """
    Outcome of check_conditions.

    Attributes:
        p_max: Largest index used for (M.1), ~(M.2)' and the (M.3)' sums
        pq_max: Largest p and q used for ~(M.2)
        log_convex: Whether 2 ln M_p <= ln M_{p-1} + ln M_{p+1} on 1 <= p < p_max
        log_convex_min_slack: Smallest relative slack of that inequality
        log_convex_worst_p: Index attaining the smallest slack
        m2_prime_log_C: Minimal ln C for ~(M.2)'
        m2_prime_worst_p: Index that forces that constant
        m2_prime_required: Per-p required ln C, p = 0..p_max
        m2_log_C: Minimal ln C for ~(M.2)
        m2_worst_pq: (p, q) that forces that constant
        m3_partial_sum: Sum over 1 <= p <= p_max of M_{p-1}/M_p
        m3_tail_bound: Geometric bound for the remaining tail
        m3_tail_monotone: Whether the trailing term ratios are nonincreasing
        m3_converged: Whether the tail bound is finite and trustworthy
        m3_max_ratio_from_2: max over p >= 2 of M_{p-1}/M_p
        tau_monotone: Whether ln M_p grows when tau is doubled, for p >= 2
    """

    p_max: int
    pq_max: int
    log_convex: bool
    log_convex_min_slack: float
    log_convex_worst_p: int
    m2_prime_log_C: float
    m2_prime_worst_p: int
    m2_prime_required: List[float] = field(repr=False)
    m2_log_C: float
    m2_worst_pq: Tuple[int, int]
    m3_partial_sum: float
    m3_tail_bound: float
    m3_tail_monotone: bool
    m3_converged: bool
    m3_max_ratio_from_2: float
    tau_monotone: bool

    @property
    def passed(self) -> bool:
        return (
            self.log_convex
            and math.isfinite(self.m2_prime_log_C)
            and math.isfinite(self.m2_log_C)
            and self.m3_converged
            and self.tau_monotone
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "p_max": self.p_max,
            "pq_max": self.pq_max,
            "passed": self.passed,
            "m1_log_convex": self.log_convex,
            "m1_min_relative_slack": self.log_convex_min_slack,
            "m1_worst_p": self.log_convex_worst_p,
            "m2_prime_log_C": self.m2_prime_log_C,
            "m2_prime_C": math.exp(self.m2_prime_log_C),
            "m2_prime_worst_p": self.m2_prime_worst_p,
            "m2_log_C": self.m2_log_C,
            "m2_C": math.exp(self.m2_log_C),
            "m2_worst_pq": list(self.m2_worst_pq),
            "m3_partial_sum": self.m3_partial_sum,
            "m3_tail_bound": self.m3_tail_bound,
            "m3_tail_monotone": self.m3_tail_monotone,
            "m3_converged": self.m3_converged,
            "m3_max_ratio_from_2": self.m3_max_ratio_from_2,
            "tau_monotone": self.tau_monotone,
        }


def _log_convexity(values: np.ndarray) -> Tuple[bool, float, int]:
    # values[p] = ln M_p, p = 0..p_max
    centre = 2.0 * values[1:-1]
    outer = values[:-2] + values[2:]
    scale = np.maximum(1.0, np.abs(outer))
    slack = (outer - centre) / scale
    worst = int(np.argmin(slack))
    return bool(np.all(slack >= -_ROUNDING_TOL)), float(slack[worst]), worst + 1


def _m2_prime(params: GevreyParams, p_max: int) -> Tuple[float, int, np.ndarray]:
    p = np.arange(p_max + 1, dtype=np.float64)
    values = np.asarray(log_M(np.arange(p_max + 2), params))
    required = (values[1:] - values[:-1]) / (p**params.sigma + 1.0)
    worst = int(np.argmax(required))
    return float(required[worst]), worst, required


def _m2(params: GevreyParams, pq_max: int) -> Tuple[float, Tuple[int, int]]:
    idx = np.arange(pq_max + 1)
    widened = params.shifted_tau(2.0 ** (params.sigma - 1.0))
    joint = np.asarray(log_M(np.arange(2 * pq_max + 1), params))
    single = np.asarray(log_M(idx, widened))
    P, Q = np.meshgrid(idx, idx, indexing="ij")
    numerator = joint[P + Q] - single[P] - single[Q]
    denominator = P.astype(np.float64) ** params.sigma + Q.astype(np.float64) ** params.sigma + 1.0
    ratio = numerator / denominator
    flat = int(np.argmax(ratio))
    p_star, q_star = np.unravel_index(flat, ratio.shape)
    return float(ratio.flat[flat]), (int(p_star), int(q_star))


def _m3_prime(values: np.ndarray) -> Tuple[float, float, bool, bool, float]:
    # log a_p = ln M_{p-1} - ln M_p for p = 1..p_max
    log_terms = values[:-1] - values[1:]
    partial = float(np.exp(logsumexp(log_terms)))
    log_ratios = np.diff(log_terms)
    window = log_ratios[-_TAIL_WINDOW:]
    tail_monotone = bool(np.all(np.diff(window) <= _ROUNDING_TOL * np.maximum(1.0, np.abs(window[1:]))))
    rho = float(np.exp(log_ratios[-1]))
    if rho < 1.0:
        tail = float(np.exp(log_terms[-1]) * rho / (1.0 - rho))
    else:
        tail = math.inf
    converged = tail_monotone and math.isfinite(tail)
    max_ratio = float(np.exp(np.max(log_terms[1:]))) if log_terms.size > 1 else math.nan
    return partial, tail, tail_monotone, converged, max_ratio


def check_conditions(
    params: GevreyParams, p_max: int, pq_max: Optional[int] = None
) -> ConditionReport:
    """
    Check (M.1), ~(M.2)', ~(M.2) and the (M.3)' summability on finite grids.

    Args:
        params: Sequence parameters (h is ignored)
        p_max: Largest index for (M.1), ~(M.2)' and the (M.3)' partial sums
        pq_max: Largest p and q for ~(M.2); defaults to ``p_max``

    Returns:
        ConditionReport with verdicts, minimal constants and the worst indices

    Raises:
        ParameterError: If p_max < 3 or pq_max < 1
    """
    if p_max < 3:
        raise ParameterError(f"p_max must be >= 3, got {p_max}")
    pq_max = p_max if pq_max is None else pq_max
    if pq_max < 1:
        raise ParameterError(f"pq_max must be >= 1, got {pq_max}")

    values = LogWeightSequence(params).values(p_max)
    convex, convex_slack, convex_worst = _log_convexity(values)
    m2p_log_C, m2p_worst, m2p_required = _m2_prime(params, p_max)
    m2_log_C, m2_worst = _m2(params, pq_max)
    partial, tail, tail_monotone, converged, max_ratio = _m3_prime(values)

    doubled = LogWeightSequence(params.shifted_tau(2.0)).values(p_max)
    tau_monotone = bool(np.all(doubled[2:] >= values[2:]))

    logger.debug(
        f"conditions tau={params.tau} sigma={params.sigma}: "
        f"M1={convex}, ~M2' lnC={m2p_log_C:.6g}, ~M2 lnC={m2_log_C:.6g}, M3' sum={partial:.6g}"
    )
    return ConditionReport(
        p_max=p_max,
        pq_max=pq_max,
        log_convex=convex,
        log_convex_min_slack=convex_slack,
        log_convex_worst_p=convex_worst,
        m2_prime_log_C=m2p_log_C,
        m2_prime_worst_p=m2p_worst,
        m2_prime_required=[float(v) for v in m2p_required],
        m2_log_C=m2_log_C,
        m2_worst_pq=m2_worst,
        m3_partial_sum=partial,
        m3_tail_bound=tail,
        m3_tail_monotone=tail_monotone,
        m3_converged=converged,
        m3_max_ratio_from_2=max_ratio,
        tau_monotone=tau_monotone,
    )


@dataclass(frozen=True)
class PowerInequalityReport:
    """Relative slacks of the elementary power inequalities on 0 <= p, q <= p_max."""

    p_max: int
    superadditive_min_slack: float
    convexity_min_slack: float
    shift_min_slack: float

    @property
    def passed(self) -> bool:
        return min(
            self.superadditive_min_slack, self.convexity_min_slack, self.shift_min_slack
        ) >= -_ROUNDING_TOL

    def to_dict(self) -> Dict[str, Any]:
        return {
            "p_max": self.p_max,
            "passed": self.passed,
            "superadditive_min_slack": self.superadditive_min_slack,
            "convexity_min_slack": self.convexity_min_slack,
            "shift_min_slack": self.shift_min_slack,
        }


def power_inequalities(params: GevreyParams, p_max: int) -> PowerInequalityReport:
    """
    Check p^s + q^s <= (p+q)^s <= 2^{s-1}(p^s + q^s) and (p+1)^s <= 2^{s-1}(p^s + 1).

    Slacks are relative to max(1, (p+q)^s) so equality cases read as 0.
    """
    s = params.sigma
    idx = np.arange(p_max + 1, dtype=np.float64)
    P, Q = np.meshgrid(idx, idx, indexing="ij")
    joint = (P + Q) ** s
    separate = P**s + Q**s
    scale = np.maximum(1.0, joint)
    superadditive = (joint - separate) / scale
    convexity = (2.0 ** (s - 1.0) * separate - joint) / scale
    shifted = (idx + 1.0) ** s
    shift = (2.0 ** (s - 1.0) * (idx**s + 1.0) - shifted) / shifted
    return PowerInequalityReport(
        p_max=p_max,
        superadditive_min_slack=float(superadditive.min()),
        convexity_min_slack=float(convexity.min()),
        shift_min_slack=float(shift.min()),
    )


def factorial_dominance_log_constant(params: GevreyParams, p_max: int = 10_000) -> Tuple[float, int]:
    """
    Minimal ln C with p^p <= C^{p^sigma} for 1 <= p <= p_max.

    Returns:
        (ln C, maximizing p). The maximum of ln p / p^{sigma-1} sits near
        p = e^{1/(sigma-1)}, so the default p_max is far more than enough.
    """
    p = np.arange(2, max(p_max, 2) + 1, dtype=np.float64)
    ratio = np.log(p) / p ** (params.sigma - 1.0)
    worst = int(np.argmax(ratio))
    return float(max(ratio[worst], 0.0)), int(p[worst])
