"""
Associated functions T_{tau,sigma,h} and T*_{tau,sigma,h} and their sandwich bounds.

Both functions are suprema over p >= 0 of terms that are affine in ln k:

    T(k)  = sup_p  p^sigma ln h + p ln k - tau p^sigma ln p
    T*(k) = sup_p  p^sigma ln h + p ln k - p (tau p^{sigma-1} - 1) ln p

with the p = 0 term equal to 0. The supremum is found by a forward scan over p
that stops once the term sequence is provably past its maximum.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from core.errors import DomainError
from core.params import GevreyParams

logger = logging.getLogger(__name__)

# Hard cap on the scanned index.
P_CAP = 1_000_000
_FIRST_CHUNK = 32

TermFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class AssocEvaluation:
    """
    Value of an associated function at one k.

    Attributes:
        value: The supremum (natural-log units, >= 0)
        argmax_p: Smallest p attaining the supremum
        scanned_up_to: Last p evaluated before the scan stopped
    """

    value: float
    argmax_p: int
    scanned_up_to: int


def _resolve_log_k(k: Optional[float], log_k: Optional[float]) -> float:
    if log_k is not None:
        if not math.isfinite(log_k):
            raise DomainError(f"ln k must be finite, got {log_k}")
        return float(log_k)
    if k is None or not math.isfinite(k) or k <= 0:
        raise DomainError(f"k must be a positive finite real, got {k}")
    return math.log(k)


def _curvature_bracket(params: GevreyParams, x: np.ndarray) -> np.ndarray:
    # p^{2-sigma} times the second derivative of p^sigma (ln h - tau ln p)
    s, t = params.sigma, params.tau
    return s * (s - 1.0) * (params.log_h - t * np.log(x)) - t * (2.0 * s - 1.0)


def _scan(
    term: TermFn,
    concave_from: Callable[[np.ndarray], np.ndarray],
    dominated: Optional[Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]] = None,
) -> AssocEvaluation:
    """
    Forward scan for sup_{p >= 0} term(p) with term(0) = 0.

    Stops at the first p >= 2 where the continuous extension of the term is
    concave on [p-1, inf) and term(p) < term(p-1); from there on the terms
    only decrease. ``dominated`` may add a second sufficient stopping rule.
    """
    best, argmax = 0.0, 0
    previous = 0.0
    start, size = 1, _FIRST_CHUNK
    while start <= P_CAP:
        p = np.arange(start, min(start + size, P_CAP + 1), dtype=np.float64)
        f = term(p)
        before = np.concatenate(([previous], f[:-1]))
        stop = (p >= 2) & concave_from(np.maximum(p - 1.0, 1.0)) & (f < before)
        if dominated is not None:
            running = np.maximum(best, np.maximum.accumulate(f))
            stop |= dominated(p, f, running)
        hit = np.flatnonzero(stop)
        last = int(hit[0]) if hit.size else p.size - 1
        window = f[: last + 1]
        i = int(np.argmax(window))
        if window[i] > best:
            best, argmax = float(window[i]), int(p[i])
        if hit.size:
            return AssocEvaluation(best, argmax, int(p[last]))
        previous = float(f[-1])
        start += size
        size *= 2
    logger.warning(f"associated-function scan reached the cap p={P_CAP}")
    return AssocEvaluation(best, argmax, P_CAP)


def _t_term(params: GevreyParams, p: np.ndarray, lk: Any) -> np.ndarray:
    ps = p**params.sigma
    return ps * params.log_h + p * lk - params.tau * ps * np.log(p)


def _t_star_term(params: GevreyParams, p: np.ndarray, lk: Any) -> np.ndarray:
    s = params.sigma
    return p**s * params.log_h + p * lk - p * (params.tau * p ** (s - 1.0) - 1.0) * np.log(p)


def T_eval(
    params: GevreyParams, k: Optional[float] = None, *, log_k: Optional[float] = None
) -> AssocEvaluation:
    """
    Evaluate T_{tau,sigma,h}(k).

    Args:
        params: (tau, sigma, h)
        k: Positive argument
        log_k: ln k, used instead of ``k`` when given (avoids exp/log round trips)

    Returns:
        AssocEvaluation with the smallest maximizing p

    Raises:
        DomainError: If k <= 0 or non-finite
    """
    lk = _resolve_log_k(k, log_k)

    def concave_from(x: np.ndarray) -> np.ndarray:
        return _curvature_bracket(params, x) < 0.0

    threshold = (max(0.0, params.log_h) + max(0.0, lk) + 1.0) / params.tau

    def dominated(p: np.ndarray, f: np.ndarray, running: np.ndarray) -> np.ndarray:
        return (np.log(p) > threshold) & (f < running - 1.0)

    return _scan(lambda p: _t_term(params, p, lk), concave_from, dominated)


def T_star_eval(
    params: GevreyParams, k: Optional[float] = None, *, log_k: Optional[float] = None
) -> AssocEvaluation:
    """Evaluate T*_{tau,sigma,h}(k); same contract as T_eval."""
    lk = _resolve_log_k(k, log_k)
    s = params.sigma

    def concave_from(x: np.ndarray) -> np.ndarray:
        # the extra p ln p adds 1/p to the second derivative
        return x ** (s - 1.0) * _curvature_bracket(params, x) < -1.0

    return _scan(lambda p: _t_star_term(params, p, lk), concave_from)


_ROW_BLOCK = 4096


def T_values(
    params: GevreyParams, log_k: Sequence[float], star: bool = False
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Values and smallest argmax indices over a grid of ln k.

    The argmax is nondecreasing in ln k, so every maximizer on the grid is at
    most the scan depth reached at the largest ln k; the grid is then evaluated
    as one dense max over p <= that depth.
    """
    lk = np.asarray(log_k, dtype=np.float64)
    if lk.size == 0:
        return np.zeros(0), np.zeros(0, dtype=np.int64)
    if not np.all(np.isfinite(lk)):
        raise DomainError("ln k grid must be finite")
    fn, term = (T_star_eval, _t_star_term) if star else (T_eval, _t_term)
    depth = fn(params, log_k=float(lk.max())).scanned_up_to
    p = np.arange(1, depth + 1, dtype=np.float64)

    values = np.empty(lk.size, dtype=np.float64)
    argmax = np.empty(lk.size, dtype=np.int64)
    flat = lk.ravel()
    for start in range(0, flat.size, _ROW_BLOCK):
        block = flat[start : start + _ROW_BLOCK]
        terms = term(params, p[None, :], block[:, None])
        i = np.argmax(terms, axis=1)
        top = terms[np.arange(block.size), i]
        positive = top > 0.0
        values[start : start + block.size] = np.where(positive, top, 0.0)
        argmax[start : start + block.size] = np.where(positive, i + 1, 0)
    return values.reshape(lk.shape), argmax.reshape(lk.shape)


@dataclass(frozen=True)
class BoundConstants:
    """
    Explicit constants of the sandwich bounds.

    Attributes:
        c1: ((sigma-1)/(tau sigma))^{1/(sigma-1)}
        c2: h^{-(sigma-1)/tau} e^{(sigma-1)/sigma} (sigma-1)/(tau sigma)
        log_k_min: ln of the domain guard max(e^2, exp(e/c2))
    """

    c1: float
    c2: float
    log_k_min: float

    @property
    def k_min(self) -> float:
        return math.exp(self.log_k_min) if self.log_k_min < 700 else math.inf

    def to_dict(self) -> Dict[str, Any]:
        return {"c1": self.c1, "c2": self.c2, "k_min": self.k_min, "log_k_min": self.log_k_min}


def bound_constants(params: GevreyParams) -> BoundConstants:
    s, t = params.sigma, params.tau
    ratio = (s - 1.0) / (t * s)
    c1 = ratio ** (1.0 / (s - 1.0))
    c2 = math.exp(-(s - 1.0) / t * params.log_h + (s - 1.0) / s) * ratio
    return BoundConstants(c1=c1, c2=c2, log_k_min=max(2.0, math.e / c2))


def bounds(
    params: GevreyParams, k: Optional[float] = None, *, log_k: Optional[float] = None
) -> Tuple[float, float, BoundConstants]:
    """
    Exponents of the two-sided asymptotic bound of T, without the fitted constants.

    Returns:
        (log_lower, log_upper, constants)

    Raises:
        DomainError: If k < k_min
    """
    lk = _resolve_log_k(k, log_k)
    constants = bound_constants(params)
    if lk < constants.log_k_min:
        raise DomainError(
            f"bounds need ln k >= {constants.log_k_min:.6g} (k >= k_min), got ln k = {lk:.6g}"
        )
    upper = _log_upper(params, constants, lk)
    lower = 0.5 * (params.sigma - 1.0) / params.sigma * upper
    return lower, upper, constants


def _log_upper(params: GevreyParams, constants: BoundConstants, lk: float) -> float:
    return constants.c1 * lk * (lk / math.log(constants.c2 * lk)) ** (1.0 / (params.sigma - 1.0))


def bounds_values(params: GevreyParams, log_k: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized (log_lower, log_upper) over a grid of ln k, all >= ln k_min."""
    pairs = [bounds(params, log_k=float(lk))[:2] for lk in log_k]
    lower = np.array([p[0] for p in pairs], dtype=np.float64)
    upper = np.array([p[1] for p in pairs], dtype=np.float64)
    return lower, upper
