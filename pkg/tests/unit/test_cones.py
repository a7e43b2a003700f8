"""
Unit tests for open cones, closed dual cones and direction membership.
"""

import math

import numpy as np
import pytest

from core.cones import (
    ClosedCone,
    ClosedConeKind,
    ConeSpec,
    closure,
    dual_cone,
    in_cone,
    pairing_direction,
)
from core.errors import ParameterError


class TestConeSpec:
    """Tests for ConeSpec construction and membership."""

    def test_parse_half_lines_and_sectors(self) -> None:
        """Test the '+', '-' and 'center:half_angle' labels."""
        assert ConeSpec.parse("+") == ConeSpec.half_line(1)
        assert ConeSpec.parse(" - ").sign == -1
        sector = ConeSpec.parse("0:0.5")
        assert sector.dimension == 2
        assert sector.half_angle == 0.5
        assert sector.label == "0:0.5"

    @pytest.mark.parametrize("text", ["up", "1:2:3", ""])
    def test_parse_rejects_garbage(self, text: str) -> None:
        """Test that unparsable labels raise ParameterError."""
        with pytest.raises(ParameterError, match="cannot parse cone"):
            ConeSpec.parse(text)

    @pytest.mark.parametrize(
        "kwargs, message",
        [
            ({"dimension": 1, "sign": 0}, "sign"),
            ({"dimension": 2, "half_angle": 0.0}, "half_angle"),
            ({"dimension": 2, "half_angle": math.pi}, "half_angle"),
            ({"dimension": 3}, "dimension 1 or 2"),
        ],
    )
    def test_invalid_cones(self, kwargs: dict, message: str) -> None:
        """Test construction checks."""
        with pytest.raises(ParameterError, match=message):
            ConeSpec(**kwargs)

    def test_center_is_wrapped(self) -> None:
        """Test that axis angles are reduced to [-pi, pi)."""
        assert ConeSpec.sector(2.0 * math.pi + 0.25, 0.5).center == pytest.approx(0.25)

    def test_contains_in_one_dimension(self) -> None:
        """Test that the open half-line excludes the origin."""
        assert ConeSpec.half_line(1).contains([1.0, -1.0, 0.0]).tolist() == [True, False, False]
        assert ConeSpec.half_line(-1).contains([-2.0]).tolist() == [True]

    def test_contains_in_two_dimensions(self) -> None:
        """Test the open sector, including the wrap-around at pi."""
        cone = ConeSpec.sector(0.0, math.pi / 4)
        inside = cone.contains([[1.0, 0.0], [1.0, 0.9], [0.0, 1.0], [0.0, 0.0]])
        assert inside.tolist() == [True, True, False, False]
        back = ConeSpec.sector(math.pi, 0.3)
        assert back.contains([[-1.0, 0.1], [-1.0, -0.1]]).tolist() == [True, True]
        assert back.contains_angle(np.array([math.pi - 0.1, -math.pi + 0.1, 0.0])).tolist() == [True, True, False]

    def test_contains_angle_needs_two_dimensions(self) -> None:
        """Test that angles are refused for half-lines."""
        with pytest.raises(ParameterError, match="two-dimensional"):
            ConeSpec.half_line(1).contains_angle([0.0])

    def test_pairing_direction_and_in_cone(self) -> None:
        """Test the axis vector and point membership."""
        assert pairing_direction(ConeSpec.half_line(-1), 0.5) == pytest.approx([-0.5])
        assert pairing_direction(ConeSpec.sector(math.pi / 2, 0.3), 2.0) == pytest.approx([0.0, 2.0], abs=1e-15)
        assert in_cone(ConeSpec.half_line(1), [0.5])
        assert not in_cone(ConeSpec.sector(0.0, 0.5), [0.0, 1.0])


class TestDualCones:
    """Tests for dual_cone, closure and ClosedCone."""

    def test_half_line_is_self_dual(self) -> None:
        """Test the one-dimensional dual."""
        dual = dual_cone(ConeSpec.half_line(-1))
        assert dual.kind == ClosedConeKind.HALF_LINE
        assert dual.sign == -1
        assert dual.contains([0.0, -1.0, 1.0]).tolist() == [True, True, False]

    def test_sector_dual_half_angle(self) -> None:
        """Test that the dual of a sector of half-angle a has half-angle pi/2 - a."""
        dual = dual_cone(ConeSpec.sector(0.3, math.pi / 6))
        assert dual.kind == ClosedConeKind.SECTOR
        assert dual.center == pytest.approx(0.3)
        assert dual.half_angle == pytest.approx(math.pi / 3)

    def test_right_angle_sector_has_ray_dual(self) -> None:
        """Test that a half-angle of pi/2 dualizes to a ray on the axis."""
        dual = dual_cone(ConeSpec.sector(0.0, math.pi / 2))
        assert dual.half_angle == 0.0
        assert dual.contains([[1.0, 0.0], [1.0, 1e-3]]).tolist() == [True, False]

    def test_obtuse_sector(self) -> None:
        """Test that obtuse sectors have the origin as dual and the plane as closure."""
        cone = ConeSpec.sector(0.0, 2.0)
        assert dual_cone(cone).kind == ClosedConeKind.ORIGIN
        assert closure(cone).kind == ClosedConeKind.WHOLE
        assert dual_cone(dual_cone(cone)).kind == ClosedConeKind.WHOLE
        assert dual_cone(closure(cone)).kind == ClosedConeKind.ORIGIN

    @pytest.mark.parametrize(
        "cone",
        [
            ConeSpec.half_line(1),
            ConeSpec.half_line(-1),
            ConeSpec.sector(0.3, math.pi / 6),
            ConeSpec.sector(-1.0, math.pi / 3),
            ConeSpec.sector(2.0, math.pi / 2),
        ],
    )
    def test_double_dual_is_the_closure(self, cone: ConeSpec) -> None:
        """Test that dualizing twice returns the closure of the open cone."""
        twice = dual_cone(dual_cone(cone))
        closed = closure(cone)
        assert twice.kind == closed.kind
        assert twice.sign == closed.sign
        assert twice.center == pytest.approx(closed.center)
        assert twice.half_angle == pytest.approx(closed.half_angle, abs=1e-12)

    def test_closed_membership_includes_boundary(self) -> None:
        """Test that closed sectors contain their boundary rays and the origin."""
        closed = closure(ConeSpec.sector(0.0, math.pi / 4))
        assert closed.contains([[1.0, 1.0], [0.0, 0.0], [0.0, 1.0]]).tolist() == [True, True, False]

    def test_intersects(self) -> None:
        """Test open-closed intersection away from the origin."""
        closed = ClosedCone(2, ClosedConeKind.SECTOR, center=0.0, half_angle=math.pi / 4)
        assert not closed.intersects(ConeSpec.sector(math.pi / 2, 0.7))
        assert closed.intersects(ConeSpec.sector(math.pi / 2, 1.0))
        assert not ClosedCone(2, ClosedConeKind.ORIGIN).intersects(ConeSpec.sector(0.0, 0.5))
        assert ClosedCone(1, ClosedConeKind.HALF_LINE, sign=1).intersects(ConeSpec.half_line(1))
        with pytest.raises(ParameterError, match="dimensions differ"):
            closed.intersects(ConeSpec.half_line(1))

    def test_to_dict(self) -> None:
        """Test the serialized forms."""
        assert ConeSpec.half_line(1).to_dict() == {"dimension": 1, "sign": 1}
        assert dual_cone(ConeSpec.sector(0.0, 2.0)).to_dict() == {"dimension": 2, "kind": "origin"}
