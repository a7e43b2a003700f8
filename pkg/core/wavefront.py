"""
Wave front detection for sampled distributions.

A point x0 and an open cone V are regular for u when the localized transform
(phi u)^(xi) decays like A exp(-T_{tau,sigma,h}(|xi|)) for xi in V. On a
finite band this is tested as follows: for every h on a grid, ln A is fitted
as the envelope of ln|(phi u)^| + T_h over the lower part of the band
[xi_min, sqrt(xi_min xi_max)], and the bound passes when the upper part stays
under that envelope. The verdict is singular when no h passes. The full
h-profile is reported so either quantifier regime can be applied by callers.

Transforms use the kernel e^{-i x . xi}; dual cones pair by y . xi >= 0.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.associated import T_values
from core.boundary import GrowthReport, GrowthSampleSpec, growth_check, log_power_exponent
from core.cones import ClosedCone, ConeSpec, dual_cone, pairing_direction
from core.errors import ConfigurationError, DomainError, ParameterError
from core.params import GevreyParams
from core.signals import SampledDistribution
from core.testfun import BumpFunction
from core.tube import TubeFunction

logger = logging.getLogger(__name__)

BAND_LOW_PERIODS = 16
BAND_HIGH_FRACTION = 0.8
NOISE_FLOOR = 1e-13
ANGULAR_BINS = 64
MIN_BINS_PER_CONE = 3
RADIAL_CURVE_BINS = 48


class WFVariant(str, Enum):
    T_THRESHOLD = "T_threshold"
    LOGPOWER_THRESHOLD = "logpower_threshold"


def default_window(dimension: int = 1) -> BumpFunction:
    """Narrow localizing window used by the wave front analysis."""
    return BumpFunction(center=tuple(0.0 for _ in range(dimension)), r_plateau=0.15, r_support=0.4)


@dataclass(frozen=True)
class Spectrum:
    """
    Localized transform V(xi) = dx^d sum_j v_j e^{-i x_j . xi} on the FFT grid.

    Attributes:
        frequencies: Physical frequencies per axis (2 pi fftfreq)
        values: Complex transform, shape of the padded grid
        window_values: bump * u on the (unpadded) sample grid
        spacing: Sample spacing
    """

    frequencies: Tuple[np.ndarray, ...]
    values: np.ndarray
    window_values: np.ndarray
    spacing: float

    @property
    def magnitudes(self) -> np.ndarray:
        return np.abs(self.values)

    @property
    def dimension(self) -> int:
        return len(self.frequencies)

    def xi_points(self) -> np.ndarray:
        mesh = np.meshgrid(*self.frequencies, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def parseval_sides(self) -> Tuple[float, float]:
        """(sum |V|^2 dxi^d / (2 pi)^d, dx^d sum |bump u|^2)."""
        d = self.dimension
        dxi = [2.0 * math.pi / (f.size * self.spacing) for f in self.frequencies]
        lhs = float(np.sum(np.abs(self.values) ** 2) * np.prod(dxi) / (2.0 * math.pi) ** d)
        rhs = float(self.spacing**d * np.sum(np.abs(self.window_values) ** 2))
        return lhs, rhs


def _window_inside(u: SampledDistribution, window: BumpFunction) -> None:
    for (lo, hi), (wlo, whi) in zip(u.box(), window.support_box()):
        if wlo < lo or whi > hi - u.spacing:
            raise DomainError(
                f"window support [{wlo:.6g}, {whi:.6g}] exceeds the grid [{lo:.6g}, {hi:.6g})"
            )


def spectrum_localized(
    u: SampledDistribution, x0: Sequence[float], bump: BumpFunction, pad_factor: int = 1
) -> Spectrum:
    """
    Windowed discrete transform of u around x0.

    Raises:
        DomainError: If the translated bump's support leaves the grid
        ParameterError: If pad_factor < 1 or dimensions disagree
    """
    if pad_factor < 1:
        raise ParameterError(f"pad_factor must be >= 1, got {pad_factor}")
    if bump.dimension != u.dimension:
        raise ParameterError("window and samples differ in dimension")
    window = bump.centered_at(x0)
    _window_inside(u, window)
    windowed = window.value(u.points()).reshape(u.shape) * u.values
    padded_shape = tuple(n * pad_factor for n in u.shape)
    transform = np.fft.fftn(windowed, s=padded_shape)
    frequencies = tuple(2.0 * math.pi * np.fft.fftfreq(n, d=u.spacing) for n in padded_shape)
    mesh = np.meshgrid(*frequencies, indexing="ij")
    phase = np.exp(-1j * sum(o * m for o, m in zip(u.origin, mesh)))
    values = u.spacing**u.dimension * transform * phase
    return Spectrum(frequencies=frequencies, values=values, window_values=windowed, spacing=u.spacing)


def dtft_direct(u: SampledDistribution, x0: Sequence[float], bump: BumpFunction, xi: Any) -> np.ndarray:
    """Direct rectangle-rule sum dx^d sum_j (bump u)_j e^{-i x_j . xi} at given frequencies."""
    window = bump.centered_at(x0)
    points = u.points()
    weights = window.value(points) * u.values.ravel()
    keep = weights != 0
    points, weights = points[keep], weights[keep]
    xi_arr = np.asarray(xi, dtype=np.float64).reshape(-1, u.dimension)
    phases = np.exp(-1j * xi_arr @ points.T)
    return u.spacing**u.dimension * (phases @ weights)


def decay_threshold(params: GevreyParams, lnA: float, xi_abs: Any, variant: WFVariant = WFVariant.T_THRESHOLD) -> Any:
    """
    ln of the decay bound at |xi|.

    T variant: lnA - T_{tau,sigma,h}(|xi|). Log-power variant:
    lnA - H (ln|xi| / ln ln|xi|)^{1/(sigma-1)} ln|xi| with H = params.h.

    Raises:
        DomainError: For |xi| <= 0, or |xi| <= e in the log-power variant
    """
    xi = np.asarray(xi_abs, dtype=np.float64)
    if np.any(~np.isfinite(xi)) or np.any(xi <= 0):
        raise DomainError("|xi| must be positive and finite")
    log_xi = np.log(xi)
    if WFVariant(variant) == WFVariant.LOGPOWER_THRESHOLD:
        if np.any(log_xi <= 1.0):
            raise DomainError("the log-power threshold needs |xi| > e")
        out = lnA - log_power_exponent(params.h, params.sigma, log_xi)
    else:
        values, _ = T_values(params, np.atleast_1d(log_xi))
        out = lnA - values.reshape(xi.shape)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class WFSearch:
    """
    Search grid and band for wf_analyze.

    Attributes:
        h_grid: Increasing h values tried for every (point, cone)
        band: (xi_min, xi_max) override; default 16 periods of the box to 0.8 Nyquist
        pad_factor: Zero-padding factor of the transform
        noise_floor: Bins below noise_floor * max|V| are ignored
        rtol: Relative slack of the pass comparison
    """

    h_grid: Tuple[float, ...] = (1.0, 2.0, 4.0, 8.0)
    band: Optional[Tuple[float, float]] = None
    pad_factor: int = 1
    noise_floor: float = NOISE_FLOOR
    rtol: float = 1e-9

    def __post_init__(self) -> None:
        grid = tuple(float(h) for h in self.h_grid)
        if not grid or any(h <= 0 for h in grid) or list(grid) != sorted(set(grid)):
            raise ParameterError(f"h_grid must be increasing positive values, got {self.h_grid}")
        object.__setattr__(self, "h_grid", grid)
        if self.band is not None and not 0 < self.band[0] < self.band[1]:
            raise ParameterError(f"band must satisfy 0 < xi_min < xi_max, got {self.band}")


def default_band(u: SampledDistribution) -> Tuple[float, float]:
    xi_min = BAND_LOW_PERIODS * 2.0 * math.pi / min(u.box_length(j) for j in range(u.dimension))
    xi_max = BAND_HIGH_FRACTION * math.pi / u.spacing
    return xi_min, xi_max


@dataclass
class HProfileEntry:
    h: float
    log_A: float
    upper_max: float
    margin: float
    passed: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "h": self.h,
            "log_A": self.log_A,
            "upper_max": self.upper_max,
            "margin": self.margin,
            "passed": self.passed,
        }


@dataclass
class WFVerdict:
    """
    Verdict for one (point, cone).

    Attributes:
        point: Localization point
        cone: Direction cone
        singular: No h on the grid passes
        fitted_h: Largest passing h, None when singular
        fitted_A: Fitted ln A at fitted_h (at the smallest h when singular)
        band: (xi_min, xi_max)
        variant: Threshold family
        h_profile: Per-h fits
        decay_curve: Rows (|xi|, max magnitude, threshold at the fitted constant)
    """

    point: Tuple[float, ...]
    cone: ConeSpec
    singular: bool
    fitted_h: Optional[float]
    fitted_A: float
    band: Tuple[float, float]
    variant: WFVariant
    h_profile: List[HProfileEntry]
    decay_curve: np.ndarray = field(repr=False, default_factory=lambda: np.zeros((0, 3)))

    @property
    def profile_monotone(self) -> bool:
        """Passing at some h implies passing at every smaller h."""
        passes = [entry.passed for entry in self.h_profile]
        return all(not later or earlier for earlier, later in zip(passes, passes[1:]))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "point": list(self.point),
            "cone": self.cone.label,
            "singular": self.singular,
            "fitted_h": self.fitted_h,
            "fitted_log_A": self.fitted_A,
            "band": list(self.band),
            "variant": self.variant.value,
            "profile_monotone": self.profile_monotone,
            "h_profile": [entry.to_dict() for entry in self.h_profile],
        }


@dataclass
class WFReport:
    params: GevreyParams
    variant: WFVariant
    band: Tuple[float, float]
    h_grid: Tuple[float, ...]
    verdicts: List[WFVerdict]

    def singular_set(self) -> List[Tuple[Tuple[float, ...], str]]:
        return [(v.point, v.cone.label) for v in self.verdicts if v.singular]

    def verdict(self, point: Sequence[float], cone_label: str) -> WFVerdict:
        key = tuple(float(p) for p in point)
        for v in self.verdicts:
            if v.point == key and v.cone.label == cone_label:
                return v
        raise KeyError(f"no verdict for point {key} and cone {cone_label}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "params": self.params.to_dict(),
            "variant": self.variant.value,
            "band": list(self.band),
            "h_grid": list(self.h_grid),
            "verdicts": [v.to_dict() for v in self.verdicts],
        }


def _cone_mask(cone: ConeSpec, xi: np.ndarray) -> np.ndarray:
    if cone.dimension != xi.shape[1]:
        raise ConfigurationError("cone dimension does not match the samples")
    if cone.dimension == 2:
        centers = -math.pi + (np.arange(ANGULAR_BINS) + 0.5) * 2.0 * math.pi / ANGULAR_BINS
        covered = int(np.count_nonzero(cone.contains_angle(centers)))
        if covered < MIN_BINS_PER_CONE:
            raise ConfigurationError(
                f"cone {cone.label} covers {covered} of {ANGULAR_BINS} angular bins, "
                f"at least {MIN_BINS_PER_CONE} are needed"
            )
    return cone.contains(xi)


def _exponents(
    params: GevreyParams, h: float, variant: WFVariant, log_xi: np.ndarray
) -> np.ndarray:
    if variant == WFVariant.LOGPOWER_THRESHOLD:
        return log_power_exponent(h, params.sigma, log_xi)
    values, _ = T_values(params.with_h(h), log_xi)
    return values


def _decay_curve(
    abs_xi: np.ndarray, log_mag: np.ndarray, band: Tuple[float, float], threshold_fn: Any
) -> np.ndarray:
    edges = np.exp(np.linspace(math.log(band[0]), math.log(band[1]), RADIAL_CURVE_BINS + 1))
    rows = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (abs_xi >= lo) & (abs_xi < hi)
        if not np.any(sel):
            continue
        center = math.sqrt(lo * hi)
        rows.append((center, float(np.exp(np.max(log_mag[sel]))), float(np.exp(threshold_fn(center)))))
    return np.asarray(rows, dtype=np.float64).reshape(-1, 3)


def wf_analyze(
    u: SampledDistribution,
    points: Sequence[Sequence[float]],
    cones: Sequence[ConeSpec],
    params: GevreyParams,
    search: Optional[WFSearch] = None,
    variant: WFVariant = WFVariant.T_THRESHOLD,
    window: Optional[BumpFunction] = None,
) -> WFReport:
    """
    Verdicts for every (point, cone).

    Raises:
        ConfigurationError: If a cone holds no bins of the band or is narrower
            than the angular resolution, or the band leaves the Nyquist range
        DomainError: If a window leaves the grid
    """
    search = search or WFSearch()
    variant = WFVariant(variant)
    window = window or default_window(u.dimension)
    band = search.band or default_band(u)
    nyquist = math.pi / u.spacing
    if band[1] > nyquist:
        raise ConfigurationError(f"band top {band[1]:.6g} exceeds Nyquist {nyquist:.6g}")
    if variant == WFVariant.LOGPOWER_THRESHOLD and band[0] <= math.e:
        raise ConfigurationError("the log-power threshold needs xi_min > e")
    split = math.sqrt(band[0] * band[1])

    verdicts: List[WFVerdict] = []
    exponent_cache: Dict[float, np.ndarray] = {}
    band_index: Optional[np.ndarray] = None
    for point in points:
        x0 = tuple(float(p) for p in np.atleast_1d(point))
        spectrum = spectrum_localized(u, x0, window, search.pad_factor)
        xi = spectrum.xi_points()
        abs_xi = np.linalg.norm(xi, axis=1)
        in_band = (abs_xi >= band[0]) & (abs_xi <= band[1])
        if band_index is None:
            band_index = np.flatnonzero(in_band)
            log_xi = np.log(abs_xi[band_index])
            for h in search.h_grid:
                exponent_cache[h] = _exponents(params, h, variant, log_xi)
        mags = spectrum.magnitudes.ravel()
        peak = float(mags.max())
        valid_all = (mags > search.noise_floor * peak) & (mags > 0)
        with np.errstate(divide="ignore"):
            log_mag = np.log(mags[band_index])
        band_xi = xi[band_index]
        band_abs = abs_xi[band_index]
        lower = band_abs <= split

        for cone in cones:
            in_cone = _cone_mask(cone, band_xi)
            if not np.any(in_cone):
                raise ConfigurationError(f"cone {cone.label} holds no frequency bins in the band")
            usable = in_cone & valid_all[band_index]
            profile: List[HProfileEntry] = []
            for h in search.h_grid:
                residual = log_mag + exponent_cache[h]
                lo_sel, hi_sel = usable & lower, usable & ~lower
                log_A = float(residual[lo_sel].max()) if np.any(lo_sel) else -math.inf
                upper = float(residual[hi_sel].max()) if np.any(hi_sel) else -math.inf
                if upper == -math.inf:
                    passed, margin = True, math.inf
                elif log_A == -math.inf:
                    passed, margin = False, -math.inf
                else:
                    margin = log_A - upper
                    passed = margin >= -search.rtol * max(1.0, abs(log_A))
                profile.append(HProfileEntry(h, log_A, upper, margin, passed))

            passing = [entry for entry in profile if entry.passed]
            singular = not passing
            chosen = passing[-1] if passing else profile[0]
            chosen_h = chosen.h

            def threshold_at(xi_abs: float, h: float = chosen_h, log_A: float = chosen.log_A) -> float:
                exp_val = _exponents(params, h, variant, np.array([math.log(xi_abs)]))[0]
                return log_A - exp_val if math.isfinite(log_A) else -math.inf

            curve = _decay_curve(
                band_abs[in_cone], log_mag[in_cone], band, threshold_at
            )
            verdict = WFVerdict(
                point=x0,
                cone=cone,
                singular=singular,
                fitted_h=None if singular else chosen.h,
                fitted_A=chosen.log_A,
                band=band,
                variant=variant,
                h_profile=profile,
                decay_curve=curve,
            )
            logger.debug(
                f"wf verdict at {x0} cone {cone.label}: singular={singular}, fitted_h={verdict.fitted_h}"
            )
            verdicts.append(verdict)
    return WFReport(params=params, variant=variant, band=band, h_grid=search.h_grid, verdicts=verdicts)


@dataclass
class TauProfile:
    """Singular verdicts across a tau grid; singular at tau2 must imply singular at tau1 < tau2."""

    tau_grid: List[float]
    singular: Dict[str, List[bool]]

    @property
    def monotone(self) -> bool:
        for flags in self.singular.values():
            for earlier, later in zip(flags, flags[1:]):
                if later and not earlier:
                    return False
        return True

    def to_dict(self) -> Dict[str, Any]:
        return {"tau_grid": self.tau_grid, "singular": self.singular, "monotone": self.monotone}


def wf_tau_profile(
    u: SampledDistribution,
    points: Sequence[Sequence[float]],
    cones: Sequence[ConeSpec],
    params: GevreyParams,
    tau_grid: Sequence[float],
    search: Optional[WFSearch] = None,
    variant: WFVariant = WFVariant.T_THRESHOLD,
    window: Optional[BumpFunction] = None,
) -> TauProfile:
    taus = sorted(float(t) for t in tau_grid)
    singular: Dict[str, List[bool]] = {}
    for tau in taus:
        report = wf_analyze(u, points, cones, params.with_tau(tau), search, variant, window)
        for v in report.verdicts:
            singular.setdefault(f"{list(v.point)}|{v.cone.label}", []).append(v.singular)
    profile = TauProfile(tau_grid=taus, singular=singular)
    if not profile.monotone:
        logger.warning("tau profile is not monotone on this band")
    return profile


@dataclass(frozen=True)
class PipelineSampling:
    """
    Boundary-value proxy u(x) = F(x + i t Y) on a grid.

    Attributes:
        t: Proxy height
        n: Samples per axis (power of two)
        box: Sampling box; defaults to F's U
        direction: Y; defaults to the cone axis with length 0.5
        resolve_factor: Band top capped at resolve_factor / (t |Y|)
    """

    t: float = 1e-2
    n: int = 16384
    box: Optional[Tuple[Tuple[float, float], ...]] = None
    direction: Optional[Tuple[float, ...]] = None
    resolve_factor: float = 1.0


@dataclass
class PipelineResult:
    report: WFReport
    contained: bool
    dual: ClosedCone
    t: float
    growth: GrowthReport
    violations: List[Tuple[Tuple[float, ...], str]]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t": self.t,
            "contained": self.contained,
            "dual_cone": self.dual.to_dict(),
            "violations": [{"point": list(p), "cone": c} for p, c in self.violations],
            "growth": self.growth.to_dict(),
            "report": self.report.to_dict(),
        }


def default_cones(dimension: int) -> List[ConeSpec]:
    if dimension == 1:
        return [ConeSpec.half_line(1), ConeSpec.half_line(-1)]
    return [ConeSpec.sector(k * math.pi / 4, math.pi / 8) for k in range(8)]


def boundary_wf_pipeline(
    F: TubeFunction,
    Gamma: Optional[ConeSpec],
    points: Sequence[Sequence[float]],
    params: GevreyParams,
    sampling: Optional[PipelineSampling] = None,
    search: Optional[WFSearch] = None,
    window: Optional[BumpFunction] = None,
    cones: Optional[Sequence[ConeSpec]] = None,
    growth_H: float = 1.0,
    growth_spec: Optional[GrowthSampleSpec] = None,
) -> PipelineResult:
    """
    Analyze the wave front of the sampled boundary-value proxy and test U x dual(Gamma) containment.

    A singular (point, cone) is contained when the point lies in U and the
    cone meets the closed dual cone.

    Raises:
        DomainError: If F fails growth_check (the violator is in the message)
    """
    sampling = sampling or PipelineSampling()
    Gamma = Gamma or F.Gamma
    growth = growth_check(F, params, growth_H, growth_spec)
    if not growth.passed:
        raise DomainError(f"{F.name} fails the growth check; worst sample {growth.worst}")

    Y = (
        np.asarray(sampling.direction, dtype=np.float64)
        if sampling.direction is not None
        else pairing_direction(Gamma, 0.5)
    )
    box = sampling.box or F.U
    lengths = {hi - lo for lo, hi in box}
    if len(lengths) != 1:
        raise ParameterError("pipeline sampling boxes must be cubes")
    spacing = lengths.pop() / sampling.n
    axes = [lo + spacing * np.arange(sampling.n) for lo, _ in box]
    mesh = np.meshgrid(*axes, indexing="ij")
    grid = np.stack([m.ravel() for m in mesh], axis=1)
    values = F(grid + 1j * sampling.t * Y[None, :]).reshape(mesh[0].shape)
    u = SampledDistribution(origin=tuple(lo for lo, _ in box), spacing=spacing, values=values)

    search = search or WFSearch()
    if search.band is None:
        lo_band, hi_band = default_band(u)
        hi_band = min(hi_band, sampling.resolve_factor / (sampling.t * float(np.linalg.norm(Y))))
        if hi_band <= lo_band:
            raise ConfigurationError(
                f"proxy height t={sampling.t:g} leaves no band above xi_min={lo_band:.6g}"
            )
        search = WFSearch(
            h_grid=search.h_grid,
            band=(lo_band, hi_band),
            pad_factor=search.pad_factor,
            noise_floor=search.noise_floor,
            rtol=search.rtol,
        )
    cone_list = list(cones) if cones is not None else default_cones(F.dimension)
    report = wf_analyze(u, points, cone_list, params, search, WFVariant.T_THRESHOLD, window)

    dual = dual_cone(Gamma)
    violations = []
    for v in report.verdicts:
        if not v.singular:
            continue
        inside_u = all(lo < p < hi for p, (lo, hi) in zip(v.point, F.U))
        if not inside_u or not dual.intersects(v.cone):
            violations.append((v.point, v.cone.label))
    logger.info(
        f"pipeline {F.name} at t={sampling.t:g}: {len(report.singular_set())} singular, "
        f"{len(violations)} outside U x dual cone"
    )
    return PipelineResult(
        report=report,
        contained=not violations,
        dual=dual,
        t=sampling.t,
        growth=growth,
        violations=violations,
    )
