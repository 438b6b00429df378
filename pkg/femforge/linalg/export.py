"""
MatrixMarket and CSV export/import of assembled matrices and vectors.

Values are written with 17 significant digits, which round-trips every
double exactly.
"""
import logging
from pathlib import Path
from typing import Union

import numpy as np
from scipy import io as spio
from scipy import sparse

from .matrices import DenseMatrix, EllMatrix, Matrix

FORMATS = ("matrixmarket", "csv")
TRIPLET_HEADER = "row,col,value"
PathLike = Union[str, Path]


def _check_format(fmt: str) -> str:
    fmt = fmt.lower()
    if fmt not in FORMATS:
        raise ValueError(f"Unsupported export format: {fmt}")
    return fmt


def _mmwrite(path: Path, data) -> None:
    # an open handle keeps the file name exactly as given
    with open(path, "wb") as handle:
        spio.mmwrite(handle, data, field="real", precision=17, symmetry="general")


def export(a: Matrix, path: PathLike, fmt: str = "matrixmarket") -> Path:
    """
    Write a matrix to ``path``.

    MatrixMarket output uses the coordinate format for ELL matrices (every
    populated slot) and the array format for dense matrices. CSV output is
    ``row,col,value`` triplets with a header line for ELL and the full grid
    for dense.

    Args:
        a: Dense or ELL matrix
        path: Destination file
        fmt: ``matrixmarket`` or ``csv``

    Returns:
        The written path
    """
    fmt = _check_format(fmt)
    path = Path(path)
    if fmt == "matrixmarket":
        _mmwrite(path, a.to_scipy().tocoo() if isinstance(a, EllMatrix) else a.values)
    elif isinstance(a, EllMatrix):
        coo = a.to_scipy().tocoo()
        triplets = np.column_stack([coo.row, coo.col, coo.data])
        np.savetxt(path, triplets, fmt=["%d", "%d", "%.17g"], delimiter=",",
                   header=TRIPLET_HEADER, comments="")
    else:
        np.savetxt(path, a.values, fmt="%.17g", delimiter=",")
    logging.info(f"Wrote {type(a).__name__} {a.n}x{a.n} to {path}")
    return path


def export_vector(v: np.ndarray, path: PathLike, fmt: str = "matrixmarket") -> Path:
    """Write a vector as a MatrixMarket N x 1 array or as one value per CSV line."""
    fmt = _check_format(fmt)
    path = Path(path)
    v = np.asarray(v, dtype=np.float64)
    if fmt == "matrixmarket":
        _mmwrite(path, v.reshape(-1, 1))
    else:
        np.savetxt(path, v, fmt="%.17g")
    return path


def import_matrix(path: PathLike, fmt: str = "matrixmarket") -> Union[DenseMatrix, sparse.csr_matrix]:
    """
    Read a matrix written by ``export``.

    Returns:
        A DenseMatrix for array/grid files, a scipy CSR matrix for
        coordinate/triplet files
    """
    fmt = _check_format(fmt)
    path = Path(path)
    if fmt == "matrixmarket":
        data = spio.mmread(str(path))
        if sparse.issparse(data):
            return sparse.csr_matrix(data)
        return DenseMatrix(np.asarray(data, dtype=np.float64))
    with open(path) as handle:
        first = handle.readline().strip()
    if first == TRIPLET_HEADER:
        table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        rows = table[:, 0].astype(np.int64)
        cols = table[:, 1].astype(np.int64)
        n = int(max(rows.max(), cols.max())) + 1 if len(table) else 0
        return sparse.csr_matrix((table[:, 2], (rows, cols)), shape=(n, n))
    return DenseMatrix(np.loadtxt(path, delimiter=",", ndmin=2))


def import_vector(path: PathLike, fmt: str = "matrixmarket") -> np.ndarray:
    """Read a vector written by ``export_vector``."""
    fmt = _check_format(fmt)
    if fmt == "matrixmarket":
        return np.asarray(spio.mmread(str(path)), dtype=np.float64).ravel()
    return np.loadtxt(path, dtype=np.float64, ndmin=1)
