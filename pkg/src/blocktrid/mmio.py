"""Matrix Market array interchange.

Matrices travel as Matrix Market dense arrays (``matrix array complex
general``, lowercase header, column-major entry order) with 17 significant
decimal digits per component, enough to round-trip binary64 exactly.  Real
arrays are accepted on input for convenience.
"""

from __future__ import annotations

import numpy as np

from .matcore import as_matrix


class MatrixMarketError(Exception):
    """The file is not a readable Matrix Market dense array."""


_HEADER = "%%matrixmarket matrix array {field} general\n"


def write_matrix(path, M) -> None:
    """Write a dense complex matrix as a Matrix Market array file."""
    M = as_matrix(M)
    rows, cols = M.shape
    with open(path, "w", encoding="ascii") as fh:
        fh.write(_HEADER.format(field="complex"))
        fh.write(f"{rows} {cols}\n")
        for j in range(cols):
            for i in range(rows):
                z = M[i, j]
                fh.write(f"{z.real:.16e} {z.imag:.16e}\n")


def read_matrix(path) -> np.ndarray:
    """Read a Matrix Market dense array file (complex or real, general)."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline()
        tokens = header.strip().lower().split()
        if len(tokens) != 5 or tokens[0] != "%%matrixmarket":
            raise MatrixMarketError(f"{path}: not a Matrix Market file")
        _, obj, fmt, field, symmetry = tokens
        if obj != "matrix" or fmt != "array":
            raise MatrixMarketError(f"{path}: only dense 'matrix array' files are supported")
        if field not in ("complex", "real", "integer"):
            raise MatrixMarketError(f"{path}: unsupported field {field!r}")
        if symmetry != "general":
            raise MatrixMarketError(f"{path}: only 'general' symmetry is supported")
        line = fh.readline()
        while line.startswith("%"):
            line = fh.readline()
        try:
            rows, cols = (int(t) for t in line.split())
        except ValueError as exc:
            raise MatrixMarketError(f"{path}: malformed size line {line!r}") from exc
        if rows < 1 or cols < 1:
            raise MatrixMarketError(f"{path}: empty array {rows}x{cols}")
        values = np.zeros(rows * cols, dtype=np.complex128)
        count = 0
        for line in fh:
            line = line.strip()
            if not line or line.startswith("%"):
                continue
            if count >= rows * cols:
                raise MatrixMarketError(f"{path}: more entries than {rows}x{cols}")
            parts = line.split()
            try:
                if field == "complex":
                    values[count] = float(parts[0]) + 1j * float(parts[1])
                else:
                    values[count] = float(parts[0])
            except (ValueError, IndexError) as exc:
                raise MatrixMarketError(f"{path}: malformed entry {line!r}") from exc
            count += 1
        if count != rows * cols:
            raise MatrixMarketError(
                f"{path}: expected {rows * cols} entries, found {count}"
            )
        return values.reshape((rows, cols), order="F")


def write_vector(path, v) -> None:
    """Write a vector as an n x 1 array file."""
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim == 1:
        v = v[:, None]
    write_matrix(path, v)


def read_vector(path) -> np.ndarray:
    """Read an n x 1 (or 1 x n) array file as a 1-D vector."""
    M = read_matrix(path)
    if M.shape[1] == 1:
        return M[:, 0]
    if M.shape[0] == 1:
        return M[0, :]
    raise MatrixMarketError(f"{path}: expected a vector, got shape {M.shape}")
