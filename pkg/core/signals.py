"""
Sampled distributions on uniform grids, fixture signals and sample-file ingestion.

A sample file is a headerless whitespace-delimited array readable by
numpy.loadtxt (two columns re, im for complex data) with a sidecar JSON of
the same stem:

    {"origin": [-4.0], "spacing": 0.001953125, "shape": [4096], "complex": false}
"""

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from core.errors import DataError, ParameterError

logger = logging.getLogger(__name__)


def _next_power_of_two(n: int) -> int:
    return 1 << max(0, (int(n) - 1).bit_length())


@dataclass(frozen=True)
class SampledDistribution:
    """
    Samples on the grid origin + spacing * index, zero-padded to powers of two.

    Attributes:
        origin: First grid coordinate per axis
        spacing: Grid step (same on every axis)
        values: Real or complex array of shape (n,) or (n1, n2)
        padded_from: Shape before zero padding
    """

    origin: Tuple[float, ...]
    spacing: float
    values: np.ndarray
    padded_from: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.values.ndim not in (1, 2) or self.values.ndim != len(self.origin):
            raise DataError(
                f"values of shape {self.values.shape} do not match origin {self.origin}"
            )
        if not self.spacing > 0 or not math.isfinite(self.spacing):
            raise DataError(f"spacing must be positive, got {self.spacing}")
        if any(n & (n - 1) for n in self.values.shape):
            raise DataError(f"sample counts must be powers of two, got {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise DataError("samples must be finite")

    @classmethod
    def from_samples(
        cls, values: Any, origin: Union[float, Sequence[float]], spacing: float
    ) -> "SampledDistribution":
        """Build a distribution, zero-padding every axis to the next power of two."""
        arr = np.asarray(values)
        if not np.iscomplexobj(arr):
            arr = arr.astype(np.float64)
        origin_t = tuple(float(o) for o in np.atleast_1d(origin))
        target = tuple(_next_power_of_two(n) for n in arr.shape)
        if target != arr.shape:
            logger.info(f"zero-padding samples from {arr.shape} to {target}")
            padded = np.zeros(target, dtype=arr.dtype)
            padded[tuple(slice(0, n) for n in arr.shape)] = arr
            arr = padded
        return cls(origin=origin_t, spacing=float(spacing), values=arr, padded_from=tuple(np.shape(values)))

    @property
    def dimension(self) -> int:
        return self.values.ndim

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(self.values.shape)

    def axis(self, j: int) -> np.ndarray:
        return self.origin[j] + self.spacing * np.arange(self.values.shape[j])

    def box(self) -> list:
        return [(self.origin[j], self.origin[j] + self.spacing * n) for j, n in enumerate(self.shape)]

    def box_length(self, j: int = 0) -> float:
        return self.spacing * self.values.shape[j]

    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*[self.axis(j) for j in range(self.dimension)], indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


def _grid(box: Sequence[Tuple[float, float]], n: int) -> Tuple[Tuple[float, ...], float, list]:
    lengths = {hi - lo for lo, hi in box}
    if len(lengths) != 1:
        raise ParameterError("sampling boxes must be cubes (equal side lengths)")
    if n & (n - 1) or n < 2:
        raise ParameterError(f"sample count must be a power of two, got {n}")
    spacing = lengths.pop() / n
    axes = [lo + spacing * np.arange(n) for lo, _ in box]
    return tuple(lo for lo, _ in box), spacing, axes


def sample_function(
    fn: Callable[[np.ndarray], np.ndarray],
    box: Sequence[Tuple[float, float]] = ((-4.0, 4.0),),
    n: int = 4096,
) -> SampledDistribution:
    """Sample fn on the half-open box with n points per axis; fn takes (m, d) points."""
    origin, spacing, axes = _grid(box, n)
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=1)
    values = np.asarray(fn(points)).reshape(mesh[0].shape)
    return SampledDistribution(origin=origin, spacing=spacing, values=values)


def heaviside(
    at: float = 0.0, box: Sequence[Tuple[float, float]] = ((-4.0, 4.0),), n: int = 4096
) -> SampledDistribution:
    """Step in the first coordinate, 1/2 on the jump."""

    def step(points: np.ndarray) -> np.ndarray:
        x = points[:, 0]
        return np.where(x > at, 1.0, np.where(x < at, 0.0, 0.5))

    return sample_function(step, box, n)


def gaussian(
    width: float = 0.5, center: Optional[Sequence[float]] = None,
    box: Sequence[Tuple[float, float]] = ((-4.0, 4.0),), n: int = 4096,
) -> SampledDistribution:
    """exp(-|x - c|^2 / (2 width^2))."""
    c = np.zeros(len(box)) if center is None else np.asarray(center, dtype=np.float64)

    def bell(points: np.ndarray) -> np.ndarray:
        return np.exp(-np.sum((points - c) ** 2, axis=1) / (2.0 * width**2))

    return sample_function(bell, box, n)


def constant(
    level: float = 1.0, box: Sequence[Tuple[float, float]] = ((-4.0, 4.0),), n: int = 4096
) -> SampledDistribution:
    return sample_function(lambda points: np.full(points.shape[0], level), box, n)


SIGNAL_FIXTURES: Dict[str, Callable[..., SampledDistribution]] = {
    "heaviside": heaviside,
    "gaussian": gaussian,
    "constant": constant,
}


def make_signal(name: str, **kwargs: Any) -> SampledDistribution:
    factory = SIGNAL_FIXTURES.get(name)
    if factory is None:
        raise ParameterError(f"unknown signal fixture '{name}'; known: {sorted(SIGNAL_FIXTURES)}")
    return factory(**kwargs)


def load_samples(path: Union[str, Path]) -> SampledDistribution:
    """
    Read a sample file and its sidecar JSON.

    Raises:
        FileNotFoundError: If either file is missing
        DataError: If the geometry and the data disagree
    """
    data_path = Path(path)
    sidecar = data_path.with_suffix(".json")
    if not data_path.exists():
        raise FileNotFoundError(f"Sample file not found: {data_path}")
    if not sidecar.exists():
        raise FileNotFoundError(f"Sidecar geometry file not found: {sidecar}")
    with open(sidecar, "r") as f:
        geometry = json.load(f)
    try:
        origin = [float(o) for o in geometry["origin"]]
        spacing = float(geometry["spacing"])
        shape = tuple(int(s) for s in geometry.get("shape", []))
    except (KeyError, TypeError, ValueError) as e:
        raise DataError(f"invalid sidecar {sidecar}: {e}") from e

    raw = np.loadtxt(data_path, dtype=np.float64, ndmin=2 if geometry.get("complex") else 1)
    if geometry.get("complex"):
        if raw.shape[1] != 2:
            raise DataError(f"complex samples need two columns, got {raw.shape[1]}")
        raw = raw[:, 0] + 1j * raw[:, 1]
    if shape:
        if int(np.prod(shape)) != raw.size:
            raise DataError(f"sidecar shape {shape} does not match {raw.size} samples")
        raw = raw.reshape(shape)
    logger.info(f"loaded {raw.size} samples from {data_path}")
    return SampledDistribution.from_samples(raw, origin, spacing)
