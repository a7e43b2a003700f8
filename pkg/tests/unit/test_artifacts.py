"""
Unit tests for the artifact writers.
"""

import math
from pathlib import Path

import numpy as np
import yaml

from core.artifacts import ArtifactWriter, columns_text, read_columns, to_plain
from core.wavefront import WFVariant


class TestToPlain:
    """Tests for to_plain."""

    def test_numpy_and_complex_values(self) -> None:
        """Test conversion of numpy scalars, arrays, enums and complex numbers."""
        data = {
            "a": np.float64(1.5),
            "b": np.arange(3),
            "c": (1, 2),
            "d": complex(1.0, -2.0),
            "e": np.bool_(True),
            "f": WFVariant.T_THRESHOLD,
        }
        plain = to_plain(data)
        assert plain == {
            "a": 1.5,
            "b": [0, 1, 2],
            "c": [1, 2],
            "d": {"re": 1.0, "im": -2.0},
            "e": True,
            "f": "T_threshold",
        }
        assert type(plain["a"]) is float
        assert type(plain["b"][0]) is int


class TestColumns:
    """Tests for columnar text files."""

    def test_header_and_read_back(self, tmp_path: Path) -> None:
        """Test that comments precede the column header and values survive."""
        rows = np.array([[1.0, 0.1], [2.0, math.pi]])
        text = columns_text(("k", "T"), rows, comments={"tau": 1.0})
        lines = text.splitlines()
        assert lines[0] == "# tau: 1.0"
        assert lines[1] == "# k T"

        path = tmp_path / "table.txt"
        path.write_text(text)
        columns = read_columns(path)
        assert list(columns) == ["k", "T"]
        assert columns["T"][1] == math.pi

    def test_nan_round_trips(self, tmp_path: Path) -> None:
        """Test that nan cells are written and read back as nan."""
        path = tmp_path / "table.txt"
        path.write_text(columns_text(("x", "y"), [[1.0, float("nan")]]))
        assert np.isnan(read_columns(path)["y"][0])


class TestArtifactWriter:
    """Tests for ArtifactWriter."""

    def test_writes_and_digests(self, tmp_path: Path) -> None:
        """Test that every write is recorded with a digest and leaves no temporary file."""
        writer = ArtifactWriter(tmp_path / "out")
        writer.yaml("summary.yaml", {"passed": True, "value": np.float64(0.25)})
        writer.json("manifest.json", {"seed": 0})
        writer.text("table.txt", "# id\n")

        assert writer.written == ["manifest.json", "summary.yaml", "table.txt"]
        assert all(len(d) == 64 for d in writer.digests.values())
        assert not list((tmp_path / "out").glob("*.tmp"))
        assert yaml.safe_load((tmp_path / "out" / "summary.yaml").read_text()) == {
            "passed": True,
            "value": 0.25,
        }

    def test_equal_inputs_give_equal_bytes(self, tmp_path: Path) -> None:
        """Test that artifacts are byte-identical across writers."""
        digests = []
        for run in ("a", "b"):
            writer = ArtifactWriter(tmp_path / run)
            writer.columns("t.txt", ("x",), np.linspace(0.0, 1.0, 5))
            writer.yaml("s.yaml", {"z": [1, 2], "a": {"b": 1.0}})
            digests.append(writer.digests)
        assert digests[0] == digests[1]

    def test_yaml_keeps_key_order(self, tmp_path: Path) -> None:
        """Test that summaries keep insertion order."""
        writer = ArtifactWriter(tmp_path)
        writer.yaml("s.yaml", {"params": 1, "passed": True})
        assert (tmp_path / "s.yaml").read_text().splitlines()[0] == "params: 1"
