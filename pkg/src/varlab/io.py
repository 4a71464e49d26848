"""Flat dumps of systems and matrices for experiment caching.

Binary format: the raw matrix as little-endian IEEE-754 float64 in
row-major order, no header.  A sidecar ``<path>.json`` records
``{"kind", "rows", "cols", "dtype": "<f8", "order": "C"}`` plus, for
systems, ``"bounded"`` and the grid ``"points"``/``"weights"``.

CSV format: one matrix row per line, values printed with 17 significant
digits so that a round trip is exact.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .grid import Grid
from .systems import OrthogonalMatrix, SampledSystem


def _meta_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def dump_binary(obj, path) -> None:
    path = Path(path)
    if isinstance(obj, SampledSystem):
        matrix = obj.values
        meta = {
            "kind": "system",
            "bounded": bool(obj.bounded),
            "points": obj.grid.points.tolist(),
            "weights": obj.grid.weights.tolist(),
        }
    elif isinstance(obj, OrthogonalMatrix):
        matrix = obj.entries
        meta = {"kind": "orthogonal"}
    else:
        matrix = np.asarray(obj, dtype=np.float64)
        meta = {"kind": "matrix"}
    if matrix.ndim != 2:
        raise ValueError("only 2-d matrices can be dumped")
    meta.update(rows=matrix.shape[0], cols=matrix.shape[1], dtype="<f8", order="C")
    path.write_bytes(np.ascontiguousarray(matrix, dtype="<f8").tobytes(order="C"))
    _meta_path(path).write_text(json.dumps(meta))


def load_binary(path):
    path = Path(path)
    meta = json.loads(_meta_path(path).read_text())
    matrix = np.frombuffer(path.read_bytes(), dtype="<f8").reshape(meta["rows"], meta["cols"])
    if meta["kind"] == "system":
        grid = Grid(meta["points"], meta["weights"])
        return SampledSystem(matrix, grid, bounded=meta["bounded"])
    if meta["kind"] == "orthogonal":
        return OrthogonalMatrix(matrix)
    return matrix.copy()


def dump_csv(matrix, path) -> None:
    if isinstance(matrix, SampledSystem):
        matrix = matrix.values
    elif isinstance(matrix, OrthogonalMatrix):
        matrix = matrix.entries
    matrix = np.asarray(matrix, dtype=np.float64)
    lines = (",".join(format(v, ".17g") for v in row) for row in matrix)
    Path(path).write_text("\n".join(lines) + "\n")


def load_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=2)
