"""
Unit tests for the log-domain weight sequences.

Tests cover:
- ln M_p and ln m_p values and conventions at p = 0, 1
- Index validation
- The structural conditions and their minimal constants
- The elementary power inequalities
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.errors import ParameterError
from core.params import GevreyParams
from core.sequences import (
    LogWeightSequence,
    SequenceKind,
    check_conditions,
    factorial_dominance_log_constant,
    log_M,
    log_m,
    power_inequalities,
)

taus = st.floats(min_value=0.1, max_value=5.0)
sigmas = st.floats(min_value=1.1, max_value=4.0)


@pytest.fixture
def reference() -> GevreyParams:
    return GevreyParams(tau=1.0, sigma=2.0, h=1.0)


class TestGevreyParams:
    """Tests for parameter validation."""

    @pytest.mark.parametrize(
        "tau, sigma, h, message",
        [
            (0.0, 2.0, 1.0, "tau must be > 0"),
            (1.0, 1.0, 1.0, "sigma must be > 1"),
            (1.0, 2.0, -1.0, "h must be > 0"),
            (float("nan"), 2.0, 1.0, "tau must be a finite real"),
        ],
    )
    def test_invalid_params(self, tau: float, sigma: float, h: float, message: str) -> None:
        """Test that invalid triples raise ParameterError."""
        with pytest.raises(ParameterError, match=message):
            GevreyParams(tau, sigma, h)

    def test_derived_params(self, reference: GevreyParams) -> None:
        """Test the copy helpers."""
        assert reference.with_h(2.0).h == 2.0
        assert reference.with_tau(3.0).tau == 3.0
        assert reference.shifted_tau(2.0).tau == 2.0
        assert reference.log_h == 0.0


class TestLogSequences:
    """Tests for log_M and log_m."""

    def test_conventions_at_zero_and_one(self, reference: GevreyParams) -> None:
        """Test M_0 = M_1 = 1 and m_0 = m_1 = 1."""
        assert log_M(0, reference) == 0.0
        assert log_M(1, reference) == 0.0
        assert log_m(0, reference) == 0.0
        assert log_m(1, reference) == 0.0

    def test_known_values(self, reference: GevreyParams) -> None:
        """Test ln M_2 = 4 ln 2 and ln m_2 = 3 ln 2 for tau = 1, sigma = 2."""
        assert log_M(2, reference) == pytest.approx(4.0 * math.log(2.0), rel=1e-15)
        assert log_m(2, reference) == pytest.approx(3.0 * math.log(2.0), rel=1e-15)
        assert log_M(3, reference) == pytest.approx(9.0 * math.log(3.0), rel=1e-15)

    def test_large_index_stays_finite(self, reference: GevreyParams) -> None:
        """Test that values far beyond double range in linear scale stay finite in log scale."""
        value = log_M(10_000, reference)
        assert math.isfinite(value)
        assert value == pytest.approx(1e8 * math.log(1e4), rel=1e-12)

    def test_array_input(self, reference: GevreyParams) -> None:
        """Test that arrays give arrays of the same shape."""
        values = log_M(np.arange(5), reference)
        assert isinstance(values, np.ndarray)
        assert values.shape == (5,)

    @pytest.mark.parametrize("p", [-1, 1.5])
    def test_invalid_index(self, reference: GevreyParams, p: float) -> None:
        """Test that negative or fractional indices are rejected."""
        with pytest.raises(ParameterError, match="sequence index"):
            log_M(p, reference)  # type: ignore[arg-type]

    def test_sequence_object(self, reference: GevreyParams) -> None:
        """Test LogWeightSequence for both kinds."""
        big = LogWeightSequence(reference).values(3)
        small = LogWeightSequence(reference, SequenceKind.m).values(3)
        assert big.shape == (4,)
        assert small[2] == pytest.approx(3.0 * math.log(2.0))

    @given(tau=taus, sigma=sigmas)
    @settings(max_examples=50, deadline=None)
    def test_log_M_nondecreasing(self, tau: float, sigma: float) -> None:
        """Test that ln M_p never decreases in p."""
        values = LogWeightSequence(GevreyParams(tau, sigma)).values(60)
        assert np.all(np.diff(values) >= 0.0)

    @given(tau=taus, sigma=sigmas)
    @settings(max_examples=50, deadline=None)
    def test_log_m_nondecreasing(self, tau: float, sigma: float) -> None:
        """Test that the cutoff scales m_p never shrink as p grows."""
        values = np.asarray(log_m(np.arange(60), GevreyParams(tau, sigma)))
        assert values[0] == 0.0
        assert np.all(np.diff(values) >= 0.0)


class TestCheckConditions:
    """Tests for check_conditions."""

    def test_reference_parameters_pass(self, reference: GevreyParams) -> None:
        """Test the verdicts and the p = 1 constraint C >= 4 for tau = 1, sigma = 2."""
        report = check_conditions(reference, 100, 150)
        assert report.passed
        assert report.log_convex
        assert report.m3_converged
        assert report.tau_monotone
        assert math.exp(report.m2_prime_required[1]) == pytest.approx(4.0, rel=1e-12)
        assert math.exp(report.m2_prime_log_C) >= 4.0 - 1e-12
        assert math.isfinite(report.m2_log_C)

    def test_report_dict(self, reference: GevreyParams) -> None:
        """Test the summary fields."""
        data = check_conditions(reference, 20).to_dict()
        assert data["pq_max"] == 20
        assert data["passed"] is True
        assert data["m2_prime_C"] == pytest.approx(math.exp(data["m2_prime_log_C"]))

    def test_p_max_too_small(self, reference: GevreyParams) -> None:
        """Test that p_max < 3 is rejected."""
        with pytest.raises(ParameterError, match="p_max must be >= 3"):
            check_conditions(reference, 2)

    @given(tau=taus, sigma=sigmas)
    @settings(max_examples=30, deadline=None)
    def test_log_convex_for_all_params(self, tau: float, sigma: float) -> None:
        """Test that the sequence is log-convex for every admissible (tau, sigma)."""
        report = check_conditions(GevreyParams(tau, sigma), 40, 10)
        assert report.log_convex


class TestPowerInequalities:
    """Tests for power_inequalities and the factorial dominance constant."""

    @given(sigma=sigmas)
    @settings(max_examples=30, deadline=None)
    def test_power_inequalities_hold(self, sigma: float) -> None:
        """Test the superadditivity, convexity and shift inequalities for sigma > 1."""
        report = power_inequalities(GevreyParams(1.0, sigma), 60)
        assert report.passed

    def test_equality_cases_read_zero(self, reference: GevreyParams) -> None:
        """Test that the minimal slacks are attained at equality cases."""
        report = power_inequalities(reference, 50)
        assert report.superadditive_min_slack == pytest.approx(0.0, abs=1e-15)
        assert report.convexity_min_slack == pytest.approx(0.0, abs=1e-15)

    def test_factorial_dominance_for_sigma_two(self, reference: GevreyParams) -> None:
        """Test that max ln p / p is attained at p = 3."""
        log_c, p = factorial_dominance_log_constant(reference)
        assert p == 3
        assert log_c == pytest.approx(math.log(3.0) / 3.0)
