"""Parameter triple (tau, sigma, h) shared by every kernel."""

import math
from dataclasses import dataclass, replace
from typing import Any, Dict

from core.errors import ParameterError


@dataclass(frozen=True)
class GevreyParams:
    """
    Parameters of the weight sequence M_p = p^{tau p^sigma}.

    Attributes:
        tau: Positive growth exponent
        sigma: Power on p, strictly greater than 1
        h: Positive scale; also carries H for the log-power threshold variant
    """

    tau: float
    sigma: float
    h: float = 1.0

    def __post_init__(self) -> None:
        for name in ("tau", "sigma", "h"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ParameterError(f"{name} must be a finite real, got {value!r}")
        if self.tau <= 0:
            raise ParameterError(f"tau must be > 0, got {self.tau}")
        if self.sigma <= 1:
            raise ParameterError(f"sigma must be > 1, got {self.sigma}")
        if self.h <= 0:
            raise ParameterError(f"h must be > 0, got {self.h}")

    @property
    def log_h(self) -> float:
        return math.log(self.h)

    def with_h(self, h: float) -> "GevreyParams":
        return replace(self, h=float(h))

    def with_tau(self, tau: float) -> "GevreyParams":
        return replace(self, tau=float(tau))

    def shifted_tau(self, factor: float) -> "GevreyParams":
        """Same sigma and h with tau multiplied by ``factor``."""
        return replace(self, tau=self.tau * factor)

    def to_dict(self) -> Dict[str, Any]:
        return {"tau": self.tau, "sigma": self.sigma, "h": self.h}
