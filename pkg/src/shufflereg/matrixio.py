"""Plain-text matrix and permutation files.

Matrix format: first line ``rows cols``, then one whitespace-separated row of
decimal reals per line. Values are written with the shortest representation
that round-trips a float64 exactly (up to 17 significant digits), so
read(write(M)) reproduces M bit for bit.

Permutation format: one index per line.
"""

from __future__ import annotations

import os

import numpy as np

from .model import Permutation, require_matrix


def format_matrix(mat) -> str:
    arr = require_matrix(mat, "matrix")
    lines = [f"{arr.shape[0]} {arr.shape[1]}"]
    for row in arr:
        lines.append(" ".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def write_matrix(mat, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_matrix(mat))


def read_matrix(path: str | os.PathLike) -> np.ndarray:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: expected 'rows cols' header, got {header!r}")
        try:
            rows, cols = int(header[0]), int(header[1])
        except ValueError:
            raise ValueError(f"{path}: non-integer dimensions in header {header!r}") from None
        if rows < 1 or cols < 1:
            raise ValueError(f"{path}: dimensions must be positive, got {rows}x{cols}")
        data = np.empty((rows, cols), dtype=np.float64)
        for i in range(rows):
            line = fh.readline()
            if not line:
                raise ValueError(f"{path}: file ends after {i} of {rows} data rows")
            parts = line.split()
            if len(parts) != cols:
                raise ValueError(
                    f"{path}: row {i} has {len(parts)} entries, expected {cols}"
                )
            try:
                data[i, :] = [float(tok) for tok in parts]
            except ValueError:
                raise ValueError(f"{path}: row {i} contains a non-numeric token") from None
        trailing = fh.read().strip()
        if trailing:
            raise ValueError(f"{path}: unexpected trailing content after {rows} rows")
    if not np.all(np.isfinite(data)):
        raise ValueError(f"{path}: matrix contains non-finite entries")
    return data


def write_permutation(perm: Permutation, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="ascii") as fh:
        for idx in perm.indices:
            fh.write(f"{int(idx)}\n")


def read_permutation(path: str | os.PathLike) -> Permutation:
    with open(path, "r", encoding="ascii") as fh:
        tokens = fh.read().split()
    try:
        indices = np.array([int(tok) for tok in tokens], dtype=np.int64)
    except ValueError:
        raise ValueError(f"{path}: permutation file contains a non-integer token") from None
    return Permutation(indices)
