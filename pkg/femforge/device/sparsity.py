"""
ELL sparsity patterns derived from mesh connectivity.
"""
from dataclasses import dataclass

import numpy as np

from ..errors import SparsityMismatchError
from ..fem.mesh import Mesh
from ..linalg.matrices import PAD


@dataclass(frozen=True, eq=False)
class SparsityPattern:
    """
    Column structure of an N x MAX_NZ ELL matrix.

    Attributes:
        max_nz: Slots per row
        row_lengths: Populated slots per row (gNbrNodeLen)
        columns: (N, max_nz) sorted column indices padded with -1 (gNbrNodeIdx)
    """
    max_nz: int
    row_lengths: np.ndarray
    columns: np.ndarray

    def __post_init__(self):
        lengths = np.asarray(self.row_lengths, dtype=np.int64)
        columns = np.asarray(self.columns, dtype=np.int64)
        n = len(lengths)
        if columns.shape != (n, self.max_nz):
            raise ValueError(f"Columns must have shape ({n}, {self.max_nz}), got {columns.shape}")
        if n and lengths.max() > self.max_nz:
            raise ValueError("A row is longer than max_nz")
        slot = np.arange(self.max_nz)
        used = slot[None, :] < lengths[:, None]
        if np.any(columns[~used] != PAD):
            raise ValueError("Padded slots must hold -1")
        rows = np.repeat(np.arange(n), lengths)
        cols = columns[used]
        keys = rows * n + cols
        if keys.size and np.any(np.diff(keys) <= 0):
            raise ValueError("Row slices must be sorted and unique")
        starts = np.zeros(n, dtype=np.int64)
        if n:
            starts[1:] = np.cumsum(lengths)[:-1]
        object.__setattr__(self, "row_lengths", lengths)
        object.__setattr__(self, "columns", columns)
        object.__setattr__(self, "_keys", keys)
        object.__setattr__(self, "_starts", starts)

    @property
    def n_rows(self) -> int:
        return len(self.row_lengths)

    @property
    def nnz(self) -> int:
        return int(self.row_lengths.sum())

    def row(self, r: int) -> np.ndarray:
        return self.columns[r, :self.row_lengths[r]]

    def slot(self, row: int, col: int) -> int:
        """Binary-search the sorted row slice for ``col``."""
        cols = self.row(row)
        pos = int(np.searchsorted(cols, col))
        if pos >= len(cols) or cols[pos] != col:
            raise SparsityMismatchError(f"Column {col} is not in row {row} of the sparsity pattern")
        return pos

    def slots(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        """Vectorized ``slot`` for many (row, col) pairs."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        n = self.n_rows
        if rows.size and (rows.max() >= n or cols.max() >= n or rows.min() < 0 or cols.min() < 0):
            raise SparsityMismatchError(f"Entry index outside the {n}-row sparsity pattern")
        keys = rows * n + cols
        pos = np.searchsorted(self._keys, keys)
        found = pos < len(self._keys)
        found[found] = self._keys[pos[found]] == keys[found]
        if not found.all():
            k = int(np.flatnonzero(~found)[0])
            raise SparsityMismatchError(
                f"Entry ({rows[k]}, {cols[k]}) is not in the sparsity pattern")
        return pos - self._starts[rows]


def build_sparsity(m: Mesh) -> SparsityPattern:
    """
    Sparsity pattern of the P1 system on ``m``: each row holds its node and
    every node sharing an element with it.
    """
    n = m.n_nodes
    elements = m.elements
    rows = np.repeat(elements, 3, axis=1).ravel()
    cols = np.tile(elements, (1, 3)).ravel()
    diagonal = np.arange(n, dtype=np.int64) * (n + 1)
    keys = np.unique(np.concatenate([rows * n + cols, diagonal]))
    key_rows, key_cols = np.divmod(keys, n)
    lengths = np.bincount(key_rows, minlength=n).astype(np.int64)
    max_nz = int(lengths.max()) if n else 0
    starts = np.zeros(n, dtype=np.int64)
    if n:
        starts[1:] = np.cumsum(lengths)[:-1]
    columns = np.full((n, max_nz), PAD, dtype=np.int64)
    columns[key_rows, np.arange(len(keys)) - starts[key_rows]] = key_cols
    return SparsityPattern(max_nz, lengths, columns)
