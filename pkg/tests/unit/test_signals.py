"""
Unit tests for sampled distributions, fixture signals and sample-file loading.
"""

import json
from pathlib import Path

import numpy as np
import pytest

from core.errors import DataError, ParameterError
from core.signals import (
    SampledDistribution,
    gaussian,
    heaviside,
    load_samples,
    make_signal,
    sample_function,
)


class TestSampledDistribution:
    """Tests for SampledDistribution."""

    def test_from_samples_pads_to_power_of_two(self) -> None:
        """Test zero padding and the recorded original shape."""
        dist = SampledDistribution.from_samples(np.ones(5), 0.0, 0.1)
        assert dist.shape == (8,)
        assert dist.padded_from == (5,)
        assert dist.values[5:] == pytest.approx([0.0, 0.0, 0.0])
        assert dist.box_length() == pytest.approx(0.8)

    def test_two_dimensional_padding(self) -> None:
        """Test that each axis is padded separately."""
        dist = SampledDistribution.from_samples(np.ones((3, 4)), [0.0, 1.0], 0.5)
        assert dist.shape == (4, 4)
        assert dist.points().shape == (16, 2)
        assert dist.box() == [(0.0, 2.0), (1.0, 3.0)]

    def test_complex_samples_keep_dtype(self) -> None:
        """Test that complex data is not cast to real."""
        dist = SampledDistribution.from_samples(np.array([1j, 2.0]), 0.0, 1.0)
        assert np.iscomplexobj(dist.values)

    @pytest.mark.parametrize(
        "kwargs, message",
        [
            ({"origin": (0.0,), "spacing": 1.0, "values": np.ones(6)}, "powers of two"),
            ({"origin": (0.0,), "spacing": 0.0, "values": np.ones(4)}, "spacing"),
            ({"origin": (0.0,), "spacing": 1.0, "values": np.array([1.0, np.nan])}, "finite"),
            ({"origin": (0.0, 0.0), "spacing": 1.0, "values": np.ones(4)}, "do not match origin"),
        ],
    )
    def test_validation(self, kwargs: dict, message: str) -> None:
        """Test the DataError checks."""
        with pytest.raises(DataError, match=message):
            SampledDistribution(**kwargs)


class TestFixtureSignals:
    """Tests for the sampled fixture signals."""

    def test_heaviside_grid(self) -> None:
        """Test the step on a small grid, one half on the jump."""
        dist = heaviside(n=8)
        assert dist.spacing == 1.0
        assert dist.axis(0) == pytest.approx(np.arange(-4.0, 4.0))
        assert dist.values.tolist() == [0.0, 0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0]

    def test_gaussian_two_dimensions(self) -> None:
        """Test a two-dimensional bell peaking at the center sample."""
        dist = gaussian(box=((-2.0, 2.0), (-2.0, 2.0)), n=16)
        assert dist.shape == (16, 16)
        assert np.unravel_index(np.argmax(dist.values), dist.shape) == (8, 8)
        assert dist.values[8, 8] == pytest.approx(1.0)

    def test_sampling_checks(self) -> None:
        """Test cube boxes and power-of-two counts."""
        with pytest.raises(ParameterError, match="cubes"):
            sample_function(lambda p: p[:, 0], ((0.0, 1.0), (0.0, 2.0)), 8)
        with pytest.raises(ParameterError, match="power of two"):
            sample_function(lambda p: p[:, 0], ((0.0, 1.0),), 6)

    def test_make_signal(self) -> None:
        """Test construction by name and unknown names."""
        assert make_signal("constant", level=2.0, n=4).values.tolist() == [2.0] * 4
        with pytest.raises(ParameterError, match="unknown signal fixture"):
            make_signal("chirp")


class TestLoadSamples:
    """Tests for load_samples."""

    @staticmethod
    def _write(tmp_path: Path, text: str, geometry: dict) -> Path:
        data = tmp_path / "samples.txt"
        data.write_text(text)
        (tmp_path / "samples.json").write_text(json.dumps(geometry))
        return data

    def test_real_samples(self, tmp_path: Path) -> None:
        """Test a real file with a sidecar, padded to four samples."""
        path = self._write(tmp_path, "1\n2\n3\n", {"origin": [0.0], "spacing": 0.5, "shape": [3]})
        dist = load_samples(path)
        assert dist.values.tolist() == [1.0, 2.0, 3.0, 0.0]
        assert dist.padded_from == (3,)
        assert dist.spacing == 0.5

    def test_complex_samples(self, tmp_path: Path) -> None:
        """Test two-column complex data."""
        path = self._write(tmp_path, "1 0\n0 1\n", {"origin": [0.0], "spacing": 1.0, "complex": True})
        dist = load_samples(path)
        assert dist.values == pytest.approx([1.0, 1j])

    def test_missing_sidecar(self, tmp_path: Path) -> None:
        """Test that the sidecar JSON is required."""
        data = tmp_path / "samples.txt"
        data.write_text("1\n")
        with pytest.raises(FileNotFoundError, match="Sidecar"):
            load_samples(data)

    def test_shape_mismatch(self, tmp_path: Path) -> None:
        """Test that the declared shape must match the sample count."""
        path = self._write(tmp_path, "1\n2\n", {"origin": [0.0], "spacing": 1.0, "shape": [3]})
        with pytest.raises(DataError, match="does not match"):
            load_samples(path)

    def test_invalid_sidecar(self, tmp_path: Path) -> None:
        """Test that a sidecar without spacing is rejected."""
        path = self._write(tmp_path, "1\n2\n", {"origin": [0.0]})
        with pytest.raises(DataError, match="invalid sidecar"):
            load_samples(path)
