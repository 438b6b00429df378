"""
Dense and ELL matrix containers and the matrix-vector product.
"""
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import sparse

# column index of an unused ELL slot
PAD = -1


@dataclass(frozen=True, eq=False)
class DenseMatrix:
    """Row-major N x N matrix."""
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError(f"Dense matrix must be square, got shape {values.shape}")
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def nnz(self) -> int:
        return int(np.count_nonzero(self.values))

    def to_dense(self) -> np.ndarray:
        return self.values.copy()

    def to_scipy(self) -> sparse.csr_matrix:
        return sparse.csr_matrix(self.values)


@dataclass(frozen=True, eq=False)
class EllMatrix:
    """
    N x MAX_NZ ELL matrix; padded slots have column -1 and value 0.

    Attributes:
        values: (N, max_nz) stored values
        columns: (N, max_nz) column indices, shared with the sparsity pattern
    """
    values: np.ndarray
    columns: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        columns = np.asarray(self.columns, dtype=np.int64)
        if values.shape != columns.shape or values.ndim != 2:
            raise ValueError(f"Values {values.shape} and columns {columns.shape} must match")
        if np.any(values[columns == PAD] != 0.0):
            raise ValueError("Padded ELL slots must hold 0")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "columns", columns)

    @classmethod
    def from_pattern(cls, pattern, values: np.ndarray) -> "EllMatrix":
        """Wrap flat or (N, max_nz) values laid out by a SparsityPattern."""
        return cls(np.asarray(values, dtype=np.float64).reshape(pattern.n_rows, pattern.max_nz),
                   pattern.columns)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def max_nz(self) -> int:
        return self.values.shape[1]

    @property
    def nnz(self) -> int:
        """Structurally populated slots."""
        return int(np.count_nonzero(self.columns != PAD))

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.n, self.n), dtype=np.float64)
        used = self.columns != PAD
        rows = np.broadcast_to(np.arange(self.n)[:, None], self.columns.shape)
        dense[rows[used], self.columns[used]] = self.values[used]
        return dense

    def to_scipy(self) -> sparse.csr_matrix:
        """CSR view holding every populated slot, explicit zeros included."""
        used = self.columns != PAD
        rows = np.broadcast_to(np.arange(self.n)[:, None], self.columns.shape)
        return sparse.csr_matrix((self.values[used], (rows[used], self.columns[used])),
                                 shape=(self.n, self.n))


Matrix = Union[DenseMatrix, EllMatrix]


def matvec(a: Matrix, x: np.ndarray) -> np.ndarray:
    """
    y = A x.

    Raises:
        ValueError: On a dimension mismatch
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (a.n,):
        raise ValueError(f"Dimension mismatch: matrix is {a.n}x{a.n}, vector has shape {x.shape}")
    if isinstance(a, DenseMatrix):
        return a.values @ x
    gathered = np.where(a.columns == PAD, 0.0, x[np.maximum(a.columns, 0)])
    return np.einsum("ij,ij->i", a.values, gathered)
