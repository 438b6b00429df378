"""
Structured triangulations of the unit square.
"""
import logging

import numpy as np

from ..errors import MeshError
from ..fem.mesh import Mesh


def unit_square_mesh(n: int) -> Mesh:
    """
    Uniform triangulation of [0, 1]^2 with ``n`` cells per side.

    Node (i, j) at (i/n, j/n) has index j*(n+1) + i. Every cell with lower-left
    corner a is split along its lower-left to upper-right diagonal into the
    counter-clockwise triangles (a, b, c) and (a, c, d), where b, c, d are the
    lower-right, upper-right and upper-left corners.

    Args:
        n: Cells per side

    Returns:
        A mesh with (n+1)^2 nodes and 2 n^2 elements

    Raises:
        MeshError: If n < 1
    """
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise MeshError(f"Mesh size must be a positive integer, got {n}")
    n = int(n)
    ticks = np.arange(n + 1, dtype=np.float64) / n
    xs, ys = np.meshgrid(ticks, ticks)
    nodes = np.column_stack([xs.ravel(), ys.ravel()])

    i, j = np.meshgrid(np.arange(n), np.arange(n))
    a = (j * (n + 1) + i).ravel()
    b = a + 1
    c = a + n + 2
    d = a + n + 1
    elements = np.empty((2 * n * n, 3), dtype=np.int64)
    elements[0::2] = np.column_stack([a, b, c])
    elements[1::2] = np.column_stack([a, c, d])
    logging.info(f"Generated {n}x{n} unit square mesh: {len(nodes)} nodes, {len(elements)} elements")
    return Mesh(nodes, elements)
