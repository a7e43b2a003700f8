"""
Artifact writers: columnar plot data, YAML summaries and the JSON manifest.

Every file is written once through a temporary sibling and ``os.replace``.
Artifacts carry no timestamps or timings, so equal inputs give equal bytes.
"""

import hashlib
import io
import json
import logging
import math
import os
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import yaml

logger = logging.getLogger(__name__)

COLUMN_FORMAT = "%.17g"


def to_plain(value: Any) -> Any:
    """Convert numpy scalars and arrays, tuples, enums and complex numbers to plain data."""
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_plain(value.tolist())
    if isinstance(value, Enum):
        return to_plain(value.value)
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.complexfloating, complex)):
        return {"re": float(value.real), "im": float(value.imag)}
    if isinstance(value, Path):
        return str(value)
    return value


def atomic_write(path: Union[str, Path], data: bytes) -> str:
    """Write bytes through a temporary file and rename; returns the sha256 hex digest."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    tmp = target.with_name(target.name + ".tmp")
    with open(tmp, "wb") as f:
        f.write(data)
    os.replace(tmp, target)
    return hashlib.sha256(data).hexdigest()


def columns_text(
    columns: Sequence[str], rows: Any, comments: Optional[Dict[str, Any]] = None
) -> str:
    """Whitespace-delimited rows under a '#' header naming the columns."""
    table = np.asarray(rows, dtype=np.float64).reshape(-1, len(columns))
    header_lines = [f"{key}: {_comment_value(val)}" for key, val in (comments or {}).items()]
    header_lines.append(" ".join(columns))
    buf = io.StringIO()
    np.savetxt(buf, table, fmt=COLUMN_FORMAT, header="\n".join(header_lines), comments="# ")
    return buf.getvalue()


def _comment_value(value: Any) -> str:
    plain = to_plain(value)
    if isinstance(plain, float) and not math.isfinite(plain):
        return str(plain)
    return json.dumps(plain, sort_keys=True)


def yaml_text(data: Any) -> str:
    return yaml.safe_dump(to_plain(data), sort_keys=False, default_flow_style=False, allow_unicode=True)


def json_text(data: Any) -> str:
    return json.dumps(to_plain(data), indent=2, sort_keys=True) + "\n"


@dataclass
class ArtifactWriter:
    """
    Writes artifacts under one output directory and records their digests.

    Attributes:
        out_dir: Target directory, created on first write
        digests: Relative path -> sha256 of every file written
    """

    out_dir: Path
    digests: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.out_dir = Path(self.out_dir)

    def _write(self, name: str, text: str) -> Path:
        path = self.out_dir / name
        self.digests[name] = atomic_write(path, text.encode("utf-8"))
        logger.info(f"wrote artifact {path}")
        return path

    def columns(
        self, name: str, columns: Sequence[str], rows: Any, comments: Optional[Dict[str, Any]] = None
    ) -> Path:
        return self._write(name, columns_text(columns, rows, comments))

    def yaml(self, name: str, data: Any) -> Path:
        return self._write(name, yaml_text(data))

    def json(self, name: str, data: Any) -> Path:
        return self._write(name, json_text(data))

    def text(self, name: str, text: str) -> Path:
        return self._write(name, text)

    @property
    def written(self) -> List[str]:
        return sorted(self.digests)


def read_columns(path: Union[str, Path]) -> Dict[str, np.ndarray]:
    """Parse a columnar file written by ``columns_text`` into name -> column."""
    lines = Path(path).read_text().splitlines()
    header = [line[2:] for line in lines if line.startswith("# ")]
    names = header[-1].split()
    data = np.loadtxt(path, comments="#", ndmin=2)
    if data.size == 0:
        return {name: np.zeros(0) for name in names}
    return {name: data[:, i] for i, name in enumerate(names)}
