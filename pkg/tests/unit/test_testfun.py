"""
Unit tests for the cutoff functions, the derivative oracle and the extended Gevrey norm.

Tests cover:
- Plateau, ramp and exterior values in one and two dimensions
- Oracle derivatives against extrapolated finite differences
- Oracle limits and parameter validation
- The norm, its stabilization and its monotonicity in the weight parameters
"""

import math

import numpy as np
import pytest

from core.errors import CapabilityError, ParameterError
from core.params import GevreyParams
from core.quadrature import ridders_derivative
from core.testfun import (
    BumpFunction,
    Combination,
    RecordingTestFunction,
    bump_derivative,
    bump_eval,
    gevrey_norm,
    log_weight,
    multi_indices,
)


@pytest.fixture
def bump() -> BumpFunction:
    return BumpFunction()


@pytest.fixture
def reference() -> GevreyParams:
    return GevreyParams(tau=1.0, sigma=2.0, h=1.0)


class TestBumpValues:
    """Tests for BumpFunction values."""

    def test_plateau_ramp_and_exterior(self, bump: BumpFunction) -> None:
        """Test 1 on the plateau, strictly between 0 and 1 on the ramp, 0 outside."""
        values = bump.value([0.0, 0.99, -1.0, 1.5, -1.5, 2.0, 3.0])
        assert values[:3] == pytest.approx([1.0, 1.0, 1.0])
        assert 0.0 < values[3] < 1.0
        assert values[3] == pytest.approx(values[4])
        assert values[5:] == pytest.approx([0.0, 0.0])

    def test_ramp_midpoint(self, bump: BumpFunction) -> None:
        """Test that the ramp crosses 1/2 at the midpoint where g vanishes."""
        assert bump_eval(bump, 1.5) == pytest.approx(0.5, abs=1e-15)

    def test_ramp_monotone(self, bump: BumpFunction) -> None:
        """Test that the profile decreases across the ramp."""
        values = bump.value(np.linspace(1.0, 2.0, 101))
        assert np.all(np.diff(values) <= 0.0)

    def test_two_dimensional_support(self) -> None:
        """Test the tensor bump: plateau at the center, zero beyond the axis support."""
        bump = BumpFunction(center=(0.0, 0.0), r_plateau=1.0, r_support=2.0)
        assert bump.axis_support == pytest.approx(math.sqrt(2.0))
        values = bump.value([[0.0, 0.0], [0.5, -0.5], [1.5, 0.0], [0.0, -1.5]])
        assert values == pytest.approx([1.0, 1.0, 0.0, 0.0])
        assert np.ravel(bump.support_box()) == pytest.approx([-math.sqrt(2.0), math.sqrt(2.0)] * 2)

    def test_centered_copy(self, bump: BumpFunction) -> None:
        """Test that centered_at moves the bump and its breakpoints."""
        moved = bump.centered_at(3.0)
        assert moved.center == (3.0,)
        assert moved.breakpoints(0) == [1.0, 2.0, 4.0, 5.0]
        assert bump_eval(moved, 3.0) == 1.0

    @pytest.mark.parametrize(
        "kwargs, message",
        [
            ({"r_plateau": 2.0, "r_support": 1.0}, "r_plateau < r_support"),
            ({"center": (0.0, 0.0, 0.0)}, "dimension must be 1 or 2"),
            ({"center": (0.0, 0.0), "r_plateau": 1.5}, "r_support/sqrt"),
            ({"max_order": 200}, "max_order"),
        ],
    )
    def test_invalid_shapes(self, kwargs: dict, message: str) -> None:
        """Test that inconsistent shapes raise ParameterError."""
        with pytest.raises(ParameterError, match=message):
            BumpFunction(**kwargs)


class TestDerivativeOracle:
    """Tests for BumpFunction.derivative."""

    @pytest.mark.parametrize("x", [1.2, 1.5, 1.8, -1.3])
    def test_first_derivative_matches_finite_differences(self, bump: BumpFunction, x: float) -> None:
        """Test the Cauchy-FFT first derivative against Ridders' extrapolation."""
        expected, err = ridders_derivative(lambda t: bump_eval(bump, t), x, step=0.05)
        assert err < 1e-6
        assert bump_derivative(bump, 1, x) == pytest.approx(expected.real, rel=1e-6, abs=1e-9)

    def test_higher_derivative_from_lower(self, bump: BumpFunction) -> None:
        """Test that differentiating order 3 numerically gives order 4."""
        expected, _ = ridders_derivative(lambda t: bump_derivative(bump, 3, t), 1.6, step=0.02)
        assert bump_derivative(bump, 4, 1.6) == pytest.approx(expected.real, rel=1e-5)

    @pytest.mark.parametrize("order", [1, 2, 3, 4, 5, 6])
    def test_orders_against_ridders_on_random_points(self, bump: BumpFunction, order: int) -> None:
        """Test order n against Ridders' derivative of order n - 1 on 100 seeded ramp points."""
        rng = np.random.default_rng(17)
        xs = rng.uniform(1.1, 1.9, 100) * rng.choice([-1.0, 1.0], 100)
        exact = bump.derivative(order, xs)
        floor = 1e-3 * float(np.max(np.abs(exact)))
        for x, value in zip(xs, exact):
            approx, _ = ridders_derivative(lambda t: bump_derivative(bump, order - 1, t), float(x), step=1e-3)
            assert abs(value - approx.real) <= 1e-6 * max(abs(value), floor)

    def test_odd_derivatives_are_antisymmetric(self, bump: BumpFunction) -> None:
        """Test psi(|x|): odd orders flip sign under x -> -x."""
        for n in (1, 3, 5):
            assert bump_derivative(bump, n, -1.4) == pytest.approx(-bump_derivative(bump, n, 1.4))
        assert bump_derivative(bump, 2, -1.4) == pytest.approx(bump_derivative(bump, 2, 1.4))

    def test_flat_outside_ramp(self, bump: BumpFunction) -> None:
        """Test that all positive orders vanish on the plateau and outside the support."""
        for n in (1, 7, 30):
            assert bump.derivative(n, [0.0, 0.5, 2.0, 2.5]) == pytest.approx([0.0] * 4)

    def test_mixed_partial_in_two_dimensions(self) -> None:
        """Test that mixed partials factor into one-dimensional derivatives."""
        bump2 = BumpFunction(center=(0.0, 0.0), r_plateau=0.5, r_support=2.0)
        one = BumpFunction(center=(0.0,), r_plateau=0.5, r_support=2.0 / math.sqrt(2.0))
        value = bump_derivative(bump2, (1, 2), [0.9, -1.0])
        assert value == pytest.approx(bump_derivative(one, 1, 0.9) * bump_derivative(one, 2, -1.0))

    def test_order_limit(self, bump: BumpFunction) -> None:
        """Test that orders above max_order raise CapabilityError."""
        with pytest.raises(CapabilityError, match="exceeds the oracle limit"):
            bump.derivative(bump.max_order + 1, 1.5)

    def test_order_shape_mismatch(self, bump: BumpFunction) -> None:
        """Test that a two-component order is refused in one dimension."""
        with pytest.raises(ParameterError, match="does not match dimension"):
            bump.derivative((1, 1), 1.5)


class TestCombinations:
    """Tests for Combination and RecordingTestFunction."""

    def test_combination_is_linear(self, bump: BumpFunction) -> None:
        """Test that values and derivatives combine linearly and boxes merge."""
        other = bump.centered_at(1.0)
        combo = Combination(((2.0, bump), (-1.0, other)))
        x = [1.3]
        assert combo.value(x) == pytest.approx(2.0 * bump.value(x) - other.value(x))
        assert combo.derivative(2, x) == pytest.approx(2.0 * bump.derivative(2, x) - other.derivative(2, x))
        assert combo.support_box() == [(-2.0, 3.0)]
        assert combo.breakpoints(0)[0] == -2.0

    def test_combination_validation(self, bump: BumpFunction) -> None:
        """Test empty and mixed-dimension combinations."""
        with pytest.raises(ParameterError, match="at least one term"):
            Combination(())
        with pytest.raises(ParameterError, match="disagree on dimension"):
            Combination(((1.0, bump), (1.0, BumpFunction(center=(0.0, 0.0), r_plateau=0.5))))

    def test_recording_wrapper(self, bump: BumpFunction) -> None:
        """Test that requested orders are recorded and reset."""
        recorder = RecordingTestFunction(bump)
        recorder.derivative(3, 1.5)
        recorder.derivative(1, 1.5)
        assert recorder.calls == [(3,), (1,)]
        assert recorder.max_requested_order() == 3
        recorder.reset()
        assert recorder.max_requested_order() == -1


class TestGevreyNorm:
    """Tests for gevrey_norm."""

    def test_weights(self, reference: GevreyParams) -> None:
        """Test the order weights and the multi-index enumeration."""
        assert log_weight(reference, 0) == 0.0
        assert log_weight(reference, 1) == 0.0
        assert log_weight(reference, 3) == pytest.approx(9.0 * math.log(3.0))
        assert multi_indices(2, 1) == [(2,)]
        assert multi_indices(2, 2) == [(0, 2), (1, 1), (2, 0)]

    def test_norm_is_finite_and_stabilizes(self, bump: BumpFunction, reference: GevreyParams) -> None:
        """Test a finite norm of at least sup |phi| that stops growing."""
        report = gevrey_norm(bump, None, reference, alpha_max=20, x_grid_density=256)
        assert math.isfinite(report.value)
        assert report.value >= 1.0
        assert report.stabilized
        assert report.alpha_max_used == 20
        assert report.per_order_ratios[0] == pytest.approx(1.0)
        assert report.worst_order < 15
        assert report.to_dict()["per_order_ratios"]["0"] == pytest.approx(1.0)

    def test_norm_decreases_with_tau_and_h(self, bump: BumpFunction, reference: GevreyParams) -> None:
        """Test that heavier weights never increase the norm."""
        base = gevrey_norm(bump, None, reference, alpha_max=12, x_grid_density=128).log_value
        heavier_tau = gevrey_norm(bump, None, reference.with_tau(2.0), alpha_max=12, x_grid_density=128)
        larger_h = gevrey_norm(bump, None, reference.with_h(2.0), alpha_max=12, x_grid_density=128)
        assert heavier_tau.log_value <= base + 1e-12
        assert larger_h.log_value <= base + 1e-12

    def test_norm_is_homogeneous(self, bump: BumpFunction, reference: GevreyParams) -> None:
        """Test that scaling phi by 3 scales its norm by 3."""
        base = gevrey_norm(bump, None, reference, alpha_max=12, x_grid_density=128)
        scaled = gevrey_norm(Combination(((3.0, bump),)), None, reference, alpha_max=12, x_grid_density=128)
        assert scaled.value == pytest.approx(3.0 * base.value, rel=1e-12)
        assert scaled.log_value == pytest.approx(base.log_value + math.log(3.0), abs=1e-12)
        assert scaled.worst_order == base.worst_order

    def test_norm_only_requests_needed_orders(self, bump: BumpFunction, reference: GevreyParams) -> None:
        """Test that the norm never asks the oracle for orders beyond alpha_max."""
        recorder = RecordingTestFunction(bump)
        gevrey_norm(recorder, [(-2.0, 2.0)], reference, alpha_max=6, x_grid_density=16)
        assert recorder.max_requested_order() == 6

    def test_norm_validation(self, bump: BumpFunction, reference: GevreyParams) -> None:
        """Test argument checks."""
        with pytest.raises(ParameterError, match="alpha_max"):
            gevrey_norm(bump, None, reference, alpha_max=0)
        with pytest.raises(ParameterError, match="x_grid_density"):
            gevrey_norm(bump, None, reference, x_grid_density=1)
