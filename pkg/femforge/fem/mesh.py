"""
Triangular meshes.
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..errors import MeshError


def signed_areas(nodes: np.ndarray, elements: np.ndarray) -> np.ndarray:
    """Signed area of every triangle; positive for counter-clockwise vertex order."""
    p0 = nodes[elements[:, 0]]
    p1 = nodes[elements[:, 1]]
    p2 = nodes[elements[:, 2]]
    return 0.5 * ((p1[:, 0] - p0[:, 0]) * (p2[:, 1] - p0[:, 1])
                  - (p2[:, 0] - p0[:, 0]) * (p1[:, 1] - p0[:, 1]))


def orient_elements(nodes: np.ndarray, elements: np.ndarray) -> Tuple[np.ndarray, int]:
    """
    Reorder clockwise triangles to counter-clockwise.

    Args:
        nodes: (N, 2) node coordinates
        elements: (M, 3) node indices

    Returns:
        The reoriented connectivity (a copy) and the number of swapped elements
    """
    elements = np.array(elements, dtype=np.int64, copy=True)
    if len(elements) == 0:
        return elements, 0
    flipped = signed_areas(np.asarray(nodes, dtype=np.float64), elements) < 0.0
    count = int(np.count_nonzero(flipped))
    if count:
        elements[flipped, 1], elements[flipped, 2] = (
            elements[flipped, 2].copy(), elements[flipped, 1].copy())
        logging.info(f"Reoriented {count} clockwise element(s)")
    return elements, count


@dataclass(frozen=True, eq=False)
class Mesh:
    """
    A 2D triangle mesh.

    Attributes:
        nodes: (N, 2) float64 coordinates
        elements: (M, 3) int64 node indices, counter-clockwise
    """
    nodes: np.ndarray
    elements: np.ndarray

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=np.float64, copy=True)
        elements = np.array(self.elements, dtype=np.int64, copy=True)
        if nodes.ndim != 2 or nodes.shape[1] != 2:
            raise MeshError(f"Nodes must have shape (N, 2), got {nodes.shape}")
        if elements.ndim != 2 or elements.shape[1] != 3:
            raise MeshError(f"Elements must have shape (M, 3), got {elements.shape}")
        if not np.all(np.isfinite(nodes)):
            raise MeshError("Node coordinates must be finite")
        if elements.size:
            bad = np.flatnonzero((elements < 0).any(axis=1) | (elements >= len(nodes)).any(axis=1))
            if bad.size:
                raise MeshError(f"Element {bad[0]} references a node outside 0..{len(nodes) - 1}")
            repeated = ((elements[:, 0] == elements[:, 1]) | (elements[:, 1] == elements[:, 2])
                        | (elements[:, 0] == elements[:, 2]))
            if repeated.any():
                raise MeshError(f"Element {np.flatnonzero(repeated)[0]} repeats a node")
            clockwise = np.flatnonzero(signed_areas(nodes, elements) < 0.0)
            if clockwise.size:
                raise MeshError(f"Element {clockwise[0]} is clockwise")
        nodes.setflags(write=False)
        elements.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "elements", elements)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    def areas(self) -> np.ndarray:
        return signed_areas(self.nodes, self.elements)

    def total_area(self) -> float:
        return float(np.sum(self.areas()))

    def same_as(self, other: "Mesh") -> bool:
        """Exact equality of coordinates and connectivity."""
        return (np.array_equal(self.nodes, other.nodes)
                and np.array_equal(self.elements, other.elements))

    def __repr__(self) -> str:
        return f"Mesh(n_nodes={self.n_nodes}, n_elements={self.n_elements})"
