"""
Open cones in R^1 and R^2, closed dual cones, and direction membership tests.

Duality uses the pairing y . xi >= 0 for all y in the cone, which together
with the kernel e^{-i x . xi} is the sign convention of the wave front module.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Sequence, Union

import numpy as np

from core.errors import ParameterError

logger = logging.getLogger(__name__)

ANGLE_TOL = 1e-12


def _wrap(angle: Any) -> Any:
    """Map angles to [-pi, pi)."""
    return (np.asarray(angle) + math.pi) % (2.0 * math.pi) - math.pi


@dataclass(frozen=True)
class ConeSpec:
    """
    Open convex cone without the origin.

    Attributes:
        dimension: 1 or 2
        sign: +1 or -1 (d = 1)
        center: Axis angle in radians (d = 2)
        half_angle: Half opening in (0, pi) (d = 2)
    """

    dimension: int
    sign: int = 1
    center: float = 0.0
    half_angle: float = 0.0

    def __post_init__(self) -> None:
        if self.dimension == 1:
            if self.sign not in (1, -1):
                raise ParameterError(f"a one-dimensional cone needs sign +1 or -1, got {self.sign}")
        elif self.dimension == 2:
            if not 0.0 < self.half_angle < math.pi:
                raise ParameterError(f"half_angle must lie in (0, pi), got {self.half_angle}")
            object.__setattr__(self, "center", float(_wrap(self.center)))
        else:
            raise ParameterError(f"cones exist here only in dimension 1 or 2, got {self.dimension}")

    @classmethod
    def half_line(cls, sign: int) -> "ConeSpec":
        return cls(dimension=1, sign=sign)

    @classmethod
    def sector(cls, center: float, half_angle: float) -> "ConeSpec":
        return cls(dimension=2, center=center, half_angle=half_angle)

    @classmethod
    def parse(cls, text: str) -> "ConeSpec":
        """'+', '-' or 'center:half_angle' (radians)."""
        text = text.strip()
        if text in ("+", "-"):
            return cls.half_line(1 if text == "+" else -1)
        try:
            center, half = (float(part) for part in text.split(":"))
        except ValueError as e:
            raise ParameterError(f"cannot parse cone '{text}'") from e
        return cls.sector(center, half)

    @property
    def label(self) -> str:
        if self.dimension == 1:
            return "+" if self.sign > 0 else "-"
        return f"{self.center:.6g}:{self.half_angle:.6g}"

    def contains(self, xi: Any) -> np.ndarray:
        """Membership of directions; xi has shape (n,) in d = 1 and (n, 2) in d = 2."""
        arr = np.asarray(xi, dtype=np.float64)
        if self.dimension == 1:
            return self.sign * arr.reshape(-1) > 0
        arr = arr.reshape(-1, 2)
        nonzero = np.hypot(arr[:, 0], arr[:, 1]) > 0
        offset = np.abs(_wrap(np.arctan2(arr[:, 1], arr[:, 0]) - self.center))
        return nonzero & (offset < self.half_angle)

    def contains_angle(self, angles: Any) -> np.ndarray:
        if self.dimension != 2:
            raise ParameterError("angles are only defined for two-dimensional cones")
        return np.abs(_wrap(np.asarray(angles) - self.center)) < self.half_angle

    def to_dict(self) -> Dict[str, Any]:
        if self.dimension == 1:
            return {"dimension": 1, "sign": self.sign}
        return {"dimension": 2, "center": self.center, "half_angle": self.half_angle}


class ClosedConeKind(str, Enum):
    HALF_LINE = "half_line"
    SECTOR = "sector"
    ORIGIN = "origin"
    WHOLE = "whole"


@dataclass(frozen=True)
class ClosedCone:
    """
    Closed convex cone.

    A two-dimensional SECTOR with half_angle 0 is a ray, with half_angle
    pi/2 a closed half-plane.
    """

    dimension: int
    kind: ClosedConeKind
    sign: int = 1
    center: float = 0.0
    half_angle: float = 0.0

    def contains(self, xi: Any) -> np.ndarray:
        arr = np.asarray(xi, dtype=np.float64)
        if self.kind == ClosedConeKind.WHOLE:
            return np.ones(arr.reshape(-1, self.dimension).shape[0], dtype=bool)
        if self.kind == ClosedConeKind.ORIGIN:
            pts = arr.reshape(-1, self.dimension)
            return np.all(pts == 0.0, axis=1)
        if self.kind == ClosedConeKind.HALF_LINE:
            return self.sign * arr.reshape(-1) >= 0
        pts = arr.reshape(-1, 2)
        zero = np.hypot(pts[:, 0], pts[:, 1]) == 0
        offset = np.abs(_wrap(np.arctan2(pts[:, 1], pts[:, 0]) - self.center))
        return zero | (offset <= self.half_angle + ANGLE_TOL)

    def intersects(self, cone: ConeSpec) -> bool:
        """Whether an open cone meets this closed cone away from the origin."""
        if cone.dimension != self.dimension:
            raise ParameterError("cone dimensions differ")
        if self.kind == ClosedConeKind.WHOLE:
            return True
        if self.kind == ClosedConeKind.ORIGIN:
            return False
        if self.kind == ClosedConeKind.HALF_LINE:
            return cone.sign == self.sign
        gap = abs(float(_wrap(cone.center - self.center)))
        return gap < cone.half_angle + self.half_angle

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"dimension": self.dimension, "kind": self.kind.value}
        if self.kind == ClosedConeKind.HALF_LINE:
            out["sign"] = self.sign
        elif self.kind == ClosedConeKind.SECTOR:
            out["center"] = self.center
            out["half_angle"] = self.half_angle
        return out


def _sector_dual(dimension: int, center: float, half_angle: float) -> ClosedCone:
    if half_angle > math.pi / 2 + ANGLE_TOL:
        return ClosedCone(dimension, ClosedConeKind.ORIGIN)
    return ClosedCone(
        dimension, ClosedConeKind.SECTOR, center=center, half_angle=max(0.0, math.pi / 2 - half_angle)
    )


def dual_cone(cone: Union[ConeSpec, ClosedCone]) -> ClosedCone:
    """
    Closed dual {xi : y . xi >= 0 for every y in the cone}.

    d = 1: the half-line of the same sign. d = 2: the sector with half-angle
    pi/2 - a when a <= pi/2 (a ray when a = pi/2), else the origin.
    """
    if isinstance(cone, ConeSpec):
        cone = closure(cone)
    if cone.kind == ClosedConeKind.HALF_LINE:
        return cone
    if cone.kind == ClosedConeKind.ORIGIN:
        return ClosedCone(cone.dimension, ClosedConeKind.WHOLE)
    if cone.kind == ClosedConeKind.WHOLE:
        return ClosedCone(cone.dimension, ClosedConeKind.ORIGIN)
    return _sector_dual(2, cone.center, cone.half_angle)


def closure(cone: ConeSpec) -> ClosedCone:
    """Closure of the convex hull of an open cone."""
    if cone.dimension == 1:
        return ClosedCone(1, ClosedConeKind.HALF_LINE, sign=cone.sign)
    if cone.half_angle > math.pi / 2 + ANGLE_TOL:
        return ClosedCone(2, ClosedConeKind.WHOLE)
    return ClosedCone(2, ClosedConeKind.SECTOR, center=cone.center, half_angle=cone.half_angle)


def pairing_direction(cone: ConeSpec, length: float) -> np.ndarray:
    """A vector of the given length on the cone axis."""
    if cone.dimension == 1:
        return np.array([cone.sign * length])
    return length * np.array([math.cos(cone.center), math.sin(cone.center)])


def in_cone(cone: ConeSpec, Y: Sequence[float]) -> bool:
    return bool(cone.contains(np.asarray(Y, dtype=np.float64).reshape(1, -1))[0])
