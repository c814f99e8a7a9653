"""Deterministic CSV/JSON writers and the run manifest.

Outputs carry no timestamps and floats are serialized with shortest
round-trip precision, so re-running a configuration reproduces files
byte-for-byte.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

__all__ = ["write_csv", "write_json", "content_hash", "write_manifest", "read_csv_columns"]


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_csv(path: Path, columns: dict[str, np.ndarray]) -> None:
    """Write named columns of equal length as CSV with a header row."""
    names = list(columns)
    arrays = [np.asarray(columns[k]) for k in names]
    n = arrays[0].size
    if any(a.size != n for a in arrays):
        raise ValueError("CSV columns must have equal length")
    lines = [",".join(names)]
    for i in range(n):
        lines.append(",".join(_fmt(a[i]) for a in arrays))
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv_columns(path: Path) -> dict[str, np.ndarray]:
    """Read a CSV written by write_csv back into named float columns."""
    lines = Path(path).read_text().strip().splitlines()
    names = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    if data.size == 0:
        return {k: np.empty(0) for k in names}
    return {k: data[:, j] for j, k in enumerate(names)}


def write_json(path: Path, obj) -> None:
    Path(path).write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def content_hash(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def write_manifest(out_dir: Path, config_text: str, outputs: list[str]) -> None:
    from . import __version__

    write_json(
        Path(out_dir) / "manifest.json",
        {
            "config": config_text,
            "config_sha256": content_hash(config_text),
            "outputs": sorted(outputs),
            "version": __version__,
        },
    )
