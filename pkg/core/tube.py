"""
Analytic functions on tubes U + i Gamma and the named fixture registry.

Evaluators take complex points of shape (n,) in one dimension and (n, 2) in
two dimensions and return complex values of shape (n,). Callers only query
points with Re z in U, Im z in Gamma and |Im z| < gamma.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.cones import ConeSpec
from core.errors import ConfigurationError, ParameterError

logger = logging.getLogger(__name__)

Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class TubeFunction:
    """
    Complex function analytic on {Re z in U, Im z in Gamma, |Im z| < gamma}.

    Attributes:
        name: Fixture name
        evaluator: Vectorized complex evaluator
        U: Open box, one (lo, hi) pair per coordinate
        Gamma: Open cone of admissible imaginary directions
        gamma: Bound on |Im z|
        singular_points: Real points where the boundary value is singular
        parameters: Fixture arguments, echoed in reports
        log_modulus: Optional ln|F| evaluator for fixtures that overflow
    """

    name: str
    evaluator: Evaluator
    U: Tuple[Tuple[float, float], ...]
    Gamma: ConeSpec
    gamma: float = 1.0
    singular_points: Tuple[float, ...] = ()
    parameters: Dict[str, Any] = field(default_factory=dict)
    log_modulus: Optional[Evaluator] = None

    @property
    def dimension(self) -> int:
        return len(self.U)

    def __call__(self, z: Any) -> np.ndarray:
        arr = np.asarray(z, dtype=np.complex128)
        if self.dimension == 1:
            arr = arr.reshape(-1)
        else:
            arr = arr.reshape(-1, self.dimension)
        return np.asarray(self.evaluator(arr), dtype=np.complex128).reshape(-1)

    def log_abs(self, z: Any) -> np.ndarray:
        """ln|F(z)|, finite where F overflows if the fixture provides it."""
        if self.log_modulus is not None:
            arr = np.asarray(z, dtype=np.complex128)
            arr = arr.reshape(-1) if self.dimension == 1 else arr.reshape(-1, self.dimension)
            return np.asarray(self.log_modulus(arr), dtype=np.float64).reshape(-1)
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self(z)))

    def admissible_direction(self, Y: Sequence[float]) -> bool:
        y = np.asarray(Y, dtype=np.float64).reshape(-1)
        norm = float(np.linalg.norm(y))
        return 0.0 < norm < self.gamma and bool(self.Gamma.contains(y.reshape(1, -1))[0])

    def describe(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "dimension": self.dimension,
            "U": [list(b) for b in self.U],
            "Gamma": self.Gamma.to_dict(),
            "gamma": self.gamma,
            "parameters": self.parameters,
        }


def _box(dimension: int, U: Optional[Sequence[Sequence[float]]]) -> Tuple[Tuple[float, float], ...]:
    if U is None:
        return tuple((-1.0, 1.0) for _ in range(dimension))
    box = tuple((float(lo), float(hi)) for lo, hi in U)
    if len(box) != dimension or any(lo >= hi for lo, hi in box):
        raise ParameterError(f"U must be {dimension} increasing intervals, got {U}")
    return box


def _upper(dimension: int) -> ConeSpec:
    if dimension == 1:
        return ConeSpec.half_line(1)
    return ConeSpec.sector(math.pi / 4, math.pi / 4)


def const(dimension: int = 1, value: complex = 1.0, U: Optional[Any] = None) -> TubeFunction:
    c = complex(value)
    return TubeFunction(
        name="const",
        evaluator=lambda z: np.full(z.shape[0], c, dtype=np.complex128),
        U=_box(dimension, U),
        Gamma=_upper(dimension),
        parameters={"value": [c.real, c.imag]},
    )


def _first_dimension(name: str, dimension: int) -> None:
    if dimension != 1:
        raise ConfigurationError(f"fixture '{name}' is one-dimensional")


def inv_z(dimension: int = 1, U: Optional[Any] = None) -> TubeFunction:
    """1/z in d = 1, 1/(z1 + z2) in d = 2; analytic for Im z in the cone."""
    if dimension == 1:
        evaluator: Evaluator = lambda z: 1.0 / z
    else:
        evaluator = lambda z: 1.0 / (z[:, 0] + z[:, 1])
    return TubeFunction(
        name="inv_z",
        evaluator=evaluator,
        U=_box(dimension, U),
        Gamma=_upper(dimension),
        singular_points=(0.0,) if dimension == 1 else (),
    )


def inv_z2(dimension: int = 1, U: Optional[Any] = None) -> TubeFunction:
    _first_dimension("inv_z2", dimension)
    return TubeFunction(
        name="inv_z2",
        evaluator=lambda z: 1.0 / (z * z),
        U=_box(1, U),
        Gamma=_upper(1),
        singular_points=(0.0,),
    )


def exp_inv_z(dimension: int = 1, U: Optional[Any] = None) -> TubeFunction:
    """exp(1/z): analytic on the upper half-plane but too fast-growing toward 0."""
    _first_dimension("exp_inv_z", dimension)

    def evaluator(z: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore", invalid="ignore"):
            return np.exp(1.0 / z)

    return TubeFunction(
        name="exp_inv_z",
        evaluator=evaluator,
        U=_box(1, U),
        Gamma=_upper(1),
        singular_points=(0.0,),
        log_modulus=lambda z: (1.0 / z).real,
    )


def gaussian_entire(dimension: int = 1, U: Optional[Any] = None) -> TubeFunction:
    """exp(-z . z); entire and bounded on bounded tubes."""
    if dimension == 1:
        evaluator: Evaluator = lambda z: np.exp(-z * z)
    else:
        evaluator = lambda z: np.exp(-(z[:, 0] ** 2 + z[:, 1] ** 2))
    return TubeFunction(
        name="gaussian_entire",
        evaluator=evaluator,
        U=_box(dimension, U),
        Gamma=_upper(dimension),
    )


def _coefficients(values: Sequence[Any], label: str) -> np.ndarray:
    """Coefficients given as numbers or [re, im] pairs."""
    out = []
    for c in values:
        if isinstance(c, (list, tuple)):
            if len(c) != 2:
                raise ConfigurationError(f"{label}: complex coefficients are [re, im] pairs, got {c}")
            out.append(complex(float(c[0]), float(c[1])))
        else:
            out.append(complex(c))
    return np.asarray(out, dtype=np.complex128)


def _pairs(values: np.ndarray) -> List[List[float]]:
    return [[float(c.real), float(c.imag)] for c in values]


def rational(
    numerator: Sequence[Any],
    denominator: Sequence[Any],
    dimension: int = 1,
    U: Optional[Any] = None,
    sign: int = 1,
) -> TubeFunction:
    """
    P(z)/Q(z) from coefficient lists, highest degree first (numpy.polyval order).

    Coefficients are numbers or [re, im] pairs. The reported parameters list
    coefficients and roots as [re, im] pairs.

    Raises:
        ConfigurationError: If Q has a root in the open half-plane of the cone
    """
    _first_dimension("rational", dimension)
    num = _coefficients(numerator, "numerator")
    den = _coefficients(denominator, "denominator")
    if den.size == 0 or np.all(den == 0):
        raise ConfigurationError("denominator must have a nonzero coefficient")
    roots = np.roots(den) if den.size > 1 else np.zeros(0, dtype=np.complex128)
    inside = roots[sign * roots.imag > 0]
    if inside.size:
        raise ConfigurationError(
            f"denominator has roots inside the tube: {[complex(r) for r in inside]}"
        )
    real_roots = tuple(sorted(float(r.real) for r in roots if abs(r.imag) <= 1e-12))
    return TubeFunction(
        name="rational",
        evaluator=lambda z: np.polyval(num, z) / np.polyval(den, z),
        U=_box(1, U),
        Gamma=ConeSpec.half_line(sign),
        singular_points=real_roots,
        parameters={
            "numerator": _pairs(num),
            "denominator": _pairs(den),
            "roots": _pairs(np.sort_complex(roots)),
            "sign": sign,
        },
    )


def combine(terms: Sequence[Tuple[complex, TubeFunction]]) -> TubeFunction:
    """
    sum_i c_i F_i on the common tube of the terms.

    Raises:
        ParameterError: If there are no terms, or the terms disagree on the cone
            or have no common base box
    """
    if not terms:
        raise ParameterError("a combination needs at least one tube function")
    first = terms[0][1]
    if any(F.Gamma != first.Gamma for _, F in terms):
        raise ParameterError("combined tube functions must share their cone")
    box = tuple(
        (max(F.U[j][0] for _, F in terms), min(F.U[j][1] for _, F in terms))
        for j in range(first.dimension)
    )
    if any(lo >= hi for lo, hi in box):
        raise ParameterError(f"combined tube functions have no common base box: {box}")
    coefficients = [complex(c) for c, _ in terms]
    functions = [F for _, F in terms]

    def evaluator(z: np.ndarray) -> np.ndarray:
        return sum(c * F.evaluator(z) for c, F in zip(coefficients, functions))  # type: ignore[return-value]

    return TubeFunction(
        name="+".join(F.name for F in functions),
        evaluator=evaluator,
        U=box,
        Gamma=first.Gamma,
        gamma=min(F.gamma for F in functions),
        singular_points=tuple(sorted({p for F in functions for p in F.singular_points})),
        parameters={
            "terms": [
                {"coefficient": [c.real, c.imag], "fixture": F.name, "parameters": F.parameters}
                for c, F in zip(coefficients, functions)
            ]
        },
    )


FIXTURES: Dict[str, Callable[..., TubeFunction]] = {
    "const": const,
    "inv_z": inv_z,
    "inv_z2": inv_z2,
    "exp_inv_z": exp_inv_z,
    "gaussian_entire": gaussian_entire,
    "rational": rational,
}


def list_fixtures() -> List[str]:
    return sorted(FIXTURES)


def make_fixture(name: str, **kwargs: Any) -> TubeFunction:
    """
    Build a named fixture.

    Raises:
        ConfigurationError: For unknown names or bad arguments
    """
    factory = FIXTURES.get(name)
    if factory is None:
        raise ConfigurationError(f"unknown tube fixture '{name}'; known: {list_fixtures()}")
    try:
        return factory(**kwargs)
    except TypeError as e:
        raise ConfigurationError(f"bad arguments for fixture '{name}': {e}") from e
