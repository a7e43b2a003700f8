"""
Unit tests for the quadrature and extrapolation primitives.
"""

import math

import numpy as np
import pytest

from core.errors import ParameterError
from core.quadrature import (
    QuadratureSpec,
    dyadic_breakpoints,
    neville_to_zero,
    panel_rule,
    ridders_derivative,
    subdivide,
)


class TestPanelRule:
    """Tests for panel_rule and subdivide."""

    def test_integrates_polynomials_exactly(self) -> None:
        """Test that an order-4 rule integrates degree 7 exactly on every panel."""
        nodes, weights = panel_rule([0.0, 1.0, 3.0], 4)
        assert nodes.size == 8
        assert np.sum(weights * nodes**5) == pytest.approx(3.0**6 / 6.0, rel=1e-13)
        assert np.sum(weights) == pytest.approx(3.0)

    def test_zero_length_panels_are_skipped(self) -> None:
        """Test that repeated breakpoints contribute no nodes."""
        nodes, _ = panel_rule([0.0, 0.0, 1.0], 5)
        assert nodes.size == 5
        assert np.all((nodes > 0.0) & (nodes < 1.0))

    def test_rejects_decreasing_breakpoints(self) -> None:
        """Test the breakpoint validation."""
        with pytest.raises(ParameterError, match="nondecreasing"):
            panel_rule([1.0, 0.0], 4)

    def test_subdivide(self) -> None:
        """Test equal splitting of each interval."""
        assert subdivide([0.0, 1.0, 3.0], 2) == pytest.approx([0.0, 0.5, 1.0, 2.0, 3.0])
        assert subdivide([1.0, 0.0, 1.0], 1) == pytest.approx([0.0, 1.0])

    def test_oscillatory_integral(self) -> None:
        """Test a smooth oscillatory integrand against its closed form."""
        nodes, weights = panel_rule(subdivide([0.0, math.pi], 8), 16)
        assert np.sum(weights * np.exp(1j * 5.0 * nodes)) == pytest.approx((np.exp(5j * math.pi) - 1.0) / 5j)


class TestDyadicBreakpoints:
    """Tests for dyadic_breakpoints."""

    def test_halving_down_to_t_min(self) -> None:
        """Test the increasing dyadic partition clipped at t_min."""
        assert dyadic_breakpoints(0.1) == pytest.approx([0.1, 0.125, 0.25, 0.5, 1.0])

    def test_invalid_range(self) -> None:
        """Test that t_min must lie below t_max."""
        with pytest.raises(ParameterError, match="0 < t_min < t_max"):
            dyadic_breakpoints(2.0)


class TestQuadratureSpec:
    """Tests for QuadratureSpec validation."""

    @pytest.mark.parametrize(
        "kwargs, message",
        [
            ({"order": 1}, "order"),
            ({"x_subpanels": 0}, "x_subpanels"),
            ({"t_min": 1.5}, "t_min"),
            ({"tolerance": 0.0}, "tolerance"),
            ({"max_refinements": -1}, "max_refinements"),
        ],
    )
    def test_invalid_settings(self, kwargs: dict, message: str) -> None:
        """Test that each field is range checked."""
        with pytest.raises(ParameterError, match=message):
            QuadratureSpec(**kwargs)


class TestExtrapolation:
    """Tests for neville_to_zero and ridders_derivative."""

    def test_neville_recovers_polynomial_limit(self) -> None:
        """Test that three samples of a quadratic extrapolate exactly."""
        steps = [0.4, 0.2, 0.1]
        result = neville_to_zero(steps, [3.0 + 2.0 * h + h * h for h in steps])
        assert result.value == pytest.approx(3.0, abs=1e-13)
        assert result.estimates[0] == pytest.approx(3.96)
        assert result.difference == pytest.approx(0.08, abs=1e-12)

    def test_neville_complex_values(self) -> None:
        """Test extrapolation of a complex linear function."""
        steps = [1.0, 0.5]
        result = neville_to_zero(steps, [1j + h for h in steps])
        assert result.value == pytest.approx(1j)

    def test_neville_validation(self) -> None:
        """Test mismatched and repeated steps."""
        with pytest.raises(ParameterError, match="equal length"):
            neville_to_zero([1.0], [1.0, 2.0])
        with pytest.raises(ParameterError, match="distinct"):
            neville_to_zero([1.0, 1.0], [1.0, 2.0])
        assert neville_to_zero([1.0], [2.0]).difference == math.inf

    def test_ridders_derivative(self) -> None:
        """Test Ridders' method on sin and a complex exponential."""
        value, err = ridders_derivative(math.sin, 0.3)
        assert value.real == pytest.approx(math.cos(0.3), abs=1e-10)
        assert err < 1e-8
        value, _ = ridders_derivative(lambda x: np.exp(2j * x), 0.0)
        assert value == pytest.approx(2j, abs=1e-9)

    def test_ridders_step_validation(self) -> None:
        """Test that the initial step must be positive."""
        with pytest.raises(ParameterError, match="step must be positive"):
            ridders_derivative(math.sin, 0.0, step=0.0)
