"""
Per-element flattened mesh arrays in device global memory.
"""
from dataclasses import dataclass

import numpy as np

from ..fem.mesh import Mesh


@dataclass(frozen=True, eq=False)
class DeviceArrays:
    """
    Coordinates and global indices stored element by element: entries
    3e, 3e+1, 3e+2 belong to the three nodes of element e.
    """
    X: np.ndarray
    Y: np.ndarray
    gIdx: np.ndarray
    n_nodes: int

    def __post_init__(self):
        if not (len(self.X) == len(self.Y) == len(self.gIdx)):
            raise ValueError("X, Y and gIdx must have equal lengths")
        if len(self.gIdx) % 3:
            raise ValueError("Array lengths must be a multiple of 3")
        if len(self.gIdx) and (self.gIdx.min() < 0 or self.gIdx.max() >= self.n_nodes):
            raise ValueError(f"gIdx values must lie in 0..{self.n_nodes - 1}")

    @property
    def n_elements(self) -> int:
        return len(self.gIdx) // 3


def flatten_mesh(m: Mesh) -> DeviceArrays:
    """Copy node coordinates into the per-element layout X, Y, gIdx."""
    g_idx = np.ascontiguousarray(m.elements.ravel(), dtype=np.int64)
    return DeviceArrays(
        X=np.ascontiguousarray(m.nodes[g_idx, 0]),
        Y=np.ascontiguousarray(m.nodes[g_idx, 1]),
        gIdx=g_idx,
        n_nodes=m.n_nodes,
    )
