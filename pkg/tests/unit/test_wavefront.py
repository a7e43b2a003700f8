"""
Unit tests for the wave front analysis of sampled distributions.

Tests cover:
- Localized spectra against direct sums and Parseval's identity
- Decay thresholds and search validation
- Singular sets of the step and bell fixtures, their independence of the window size, and the tau profile
- The boundary-value pipeline and its containment test
"""

import math

import numpy as np
import pytest

from core.cones import ConeSpec
from core.errors import ConfigurationError, DomainError, ParameterError
from core.params import GevreyParams
from core.signals import SampledDistribution, gaussian, heaviside
from core.testfun import BumpFunction
from core.tube import exp_inv_z, inv_z
from core.wavefront import (
    PipelineSampling,
    WFSearch,
    WFVariant,
    boundary_wf_pipeline,
    decay_threshold,
    default_band,
    default_cones,
    default_window,
    dtft_direct,
    spectrum_localized,
    wf_analyze,
    wf_tau_profile,
)

POINTS = [[-0.5], [0.0], [0.5]]


@pytest.fixture
def reference() -> GevreyParams:
    return GevreyParams(tau=1.0, sigma=2.0, h=1.0)


@pytest.fixture(scope="module")
def step() -> SampledDistribution:
    return heaviside()


class TestSpectrum:
    """Tests for spectrum_localized and dtft_direct."""

    def test_fft_matches_direct_sum(self, step: SampledDistribution) -> None:
        """Test the FFT transform against the direct sum on in-band bins."""
        window = default_window(1)
        spectrum = spectrum_localized(step, (0.0,), window)
        lo, hi = default_band(step)
        xi = spectrum.frequencies[0]
        picked = np.flatnonzero((np.abs(xi) >= lo) & (np.abs(xi) <= hi))[::40]
        direct = dtft_direct(step, (0.0,), window, xi[picked])
        assert np.max(np.abs(spectrum.values[picked] - direct) / np.abs(direct)) <= 1e-6

    def test_parseval(self, step: SampledDistribution) -> None:
        """Test that both sides of Parseval's identity agree."""
        lhs, rhs = spectrum_localized(step, (0.3,), default_window(1)).parseval_sides()
        assert abs(lhs - rhs) / rhs <= 1e-9

    def test_padding_refines_the_grid(self, step: SampledDistribution) -> None:
        """Test that pad_factor multiplies the number of frequency bins."""
        spectrum = spectrum_localized(step, (0.0,), default_window(1), pad_factor=2)
        assert spectrum.values.shape == (2 * step.shape[0],)
        assert spectrum.xi_points().shape == (2 * step.shape[0], 1)

    def test_window_must_fit(self, step: SampledDistribution) -> None:
        """Test that a window crossing the grid edge is a domain error."""
        with pytest.raises(DomainError, match="exceeds the grid"):
            spectrum_localized(step, (3.9,), default_window(1))

    def test_argument_checks(self, step: SampledDistribution) -> None:
        """Test pad factor and dimension checks."""
        with pytest.raises(ParameterError, match="pad_factor"):
            spectrum_localized(step, (0.0,), default_window(1), pad_factor=0)
        with pytest.raises(ParameterError, match="differ in dimension"):
            spectrum_localized(step, (0.0, 0.0), default_window(2))


class TestThresholds:
    """Tests for decay_threshold and WFSearch."""

    def test_T_threshold(self, reference: GevreyParams) -> None:
        """Test lnA - T(|xi|) at |xi| = e^4."""
        assert decay_threshold(reference, 0.0, math.exp(4.0)) == pytest.approx(-(8.0 - 4.0 * math.log(2.0)))
        values = decay_threshold(reference, 1.0, np.array([math.exp(4.0), 0.5]))
        assert values.shape == (2,)
        assert values[1] == pytest.approx(1.0)

    def test_log_power_threshold(self, reference: GevreyParams) -> None:
        """Test the log-power exponent at ln|xi| = e."""
        value = decay_threshold(reference, 0.0, math.exp(math.e), WFVariant.LOGPOWER_THRESHOLD)
        assert value == pytest.approx(-math.e**2)

    def test_threshold_domain(self, reference: GevreyParams) -> None:
        """Test that |xi| must be positive, and above e for the log-power family."""
        with pytest.raises(DomainError, match="positive and finite"):
            decay_threshold(reference, 0.0, 0.0)
        with pytest.raises(DomainError, match="needs \\|xi\\| > e"):
            decay_threshold(reference, 0.0, 2.0, "logpower_threshold")

    def test_search_validation(self) -> None:
        """Test the h grid and band checks."""
        assert WFSearch(h_grid=(1, 2)).h_grid == (1.0, 2.0)
        with pytest.raises(ParameterError, match="h_grid"):
            WFSearch(h_grid=(2.0, 1.0))
        with pytest.raises(ParameterError, match="h_grid"):
            WFSearch(h_grid=())
        with pytest.raises(ParameterError, match="band"):
            WFSearch(band=(2.0, 1.0))


class TestAnalyze:
    """Tests for wf_analyze and wf_tau_profile."""

    def test_step_is_singular_only_at_the_jump(self, step: SampledDistribution, reference: GevreyParams) -> None:
        """Test that the step is singular at 0 in both directions and regular elsewhere."""
        report = wf_analyze(step, POINTS, default_cones(1), reference)
        assert set(report.singular_set()) == {((0.0,), "+"), ((0.0,), "-")}
        verdict = report.verdict([0.0], "+")
        assert verdict.fitted_h is None
        assert verdict.decay_curve.shape[1] == 3
        regular = report.verdict([0.5], "+")
        assert regular.fitted_h is not None
        with pytest.raises(KeyError):
            report.verdict([0.25], "+")

    def test_smaller_window_keeps_the_verdicts(self, step: SampledDistribution, reference: GevreyParams) -> None:
        """Test that shrinking the localizing window around each point changes no verdict."""
        cones = default_cones(1)
        wide = wf_analyze(step, POINTS, cones, reference)
        narrow = wf_analyze(step, POINTS, cones, reference, window=BumpFunction(r_plateau=0.1, r_support=0.3))
        assert set(narrow.singular_set()) == set(wide.singular_set())

    def test_bell_is_regular(self, reference: GevreyParams) -> None:
        """Test that the Gaussian has an empty singular set."""
        report = wf_analyze(gaussian(), POINTS, default_cones(1), reference)
        assert report.singular_set() == []
        assert len(report.to_dict()["verdicts"]) == 6

    def test_log_power_variant_runs(self, reference: GevreyParams) -> None:
        """Test that the log-power family produces one verdict per cone."""
        report = wf_analyze(gaussian(), [[0.0]], default_cones(1), reference, variant="logpower_threshold")
        assert report.variant == WFVariant.LOGPOWER_THRESHOLD
        assert [v.cone.label for v in report.verdicts] == ["+", "-"]
        assert report.to_dict()["variant"] == "logpower_threshold"

    def test_tau_profile_is_monotone(self, step: SampledDistribution, reference: GevreyParams) -> None:
        """Test that singular verdicts never appear only at the larger tau."""
        profile = wf_tau_profile(step, [[0.0]], default_cones(1), reference, [2.0, 0.5, 1.0])
        assert profile.tau_grid == [0.5, 1.0, 2.0]
        assert profile.monotone
        assert set(profile.singular) == {"[0.0]|+", "[0.0]|-"}

    def test_band_checks(self, step: SampledDistribution, reference: GevreyParams) -> None:
        """Test the Nyquist and log-power band guards."""
        with pytest.raises(ConfigurationError, match="exceeds Nyquist"):
            wf_analyze(step, [[0.0]], default_cones(1), reference, WFSearch(band=(10.0, 1e6)))
        with pytest.raises(ConfigurationError, match="xi_min > e"):
            wf_analyze(
                step, [[0.0]], default_cones(1), reference, WFSearch(band=(1.0, 100.0)),
                WFVariant.LOGPOWER_THRESHOLD,
            )

    def test_cone_checks_in_two_dimensions(self, reference: GevreyParams) -> None:
        """Test narrow cones and mismatched cone dimensions."""
        bell = gaussian(box=((-2.0, 2.0), (-2.0, 2.0)), n=64)
        with pytest.raises(ConfigurationError, match="angular bins"):
            wf_analyze(bell, [[0.0, 0.0]], [ConeSpec.sector(0.0, 0.01)], reference)
        with pytest.raises(ConfigurationError, match="cone dimension"):
            wf_analyze(bell, [[0.0, 0.0]], [ConeSpec.half_line(1)], reference)

    def test_default_cones(self) -> None:
        """Test the default direction sets."""
        assert [c.label for c in default_cones(1)] == ["+", "-"]
        assert len(default_cones(2)) == 8


class TestPipeline:
    """Tests for boundary_wf_pipeline."""

    def test_inverse_is_contained(self, reference: GevreyParams) -> None:
        """Test that the proxy of 1/(x + i0) is singular at 0 only in the dual cone."""
        result = boundary_wf_pipeline(inv_z(), None, [[0.0]], reference, PipelineSampling(t=1e-2))
        assert result.contained
        assert [c for _, c in result.report.singular_set()] == ["+"]
        assert result.violations == []
        assert result.growth.passed
        assert result.to_dict()["dual_cone"] == {"dimension": 1, "kind": "half_line", "sign": 1}

    def test_growth_failure_is_a_domain_error(self, reference: GevreyParams) -> None:
        """Test that a too-fast tube function never reaches the analysis."""
        with pytest.raises(DomainError, match="fails the growth check"):
            boundary_wf_pipeline(exp_inv_z(), None, [[0.0]], reference)

    def test_height_must_leave_a_band(self, reference: GevreyParams) -> None:
        """Test that a large proxy height leaves no resolvable band."""
        with pytest.raises(ConfigurationError, match="leaves no band"):
            boundary_wf_pipeline(inv_z(), None, [[0.0]], reference, PipelineSampling(t=0.5, n=1024))
