"""
Tests for the structured mesh generator and mesh files.
"""
import os
import sys

import numpy as np
import pytest

# Add the project root directory to the Python path if not already added
project_root = os.path.abspath(os.path.join(os.path.dirname(__file__), '../..'))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from femforge.device import build_sparsity
from femforge.errors import MeshError, MeshFormatError
from femforge.meshgen import format_mesh, parse_mesh, read_mesh, unit_square_mesh, write_mesh

SQUARE = """# unit square, two triangles
nodes 4
0 0
1 0
1 1   # upper right
0 1

elements 2
0 1 2
0 2 3
"""


@pytest.mark.parametrize("n, nodes, elements", [(1, 4, 2), (2, 9, 8), (5, 36, 50)])
def test_unit_square_counts(n, nodes, elements):
    """Test node and element counts of the generated mesh."""
    # Act
    mesh = unit_square_mesh(n)

    # Assert
    assert mesh.n_nodes == nodes
    assert mesh.n_elements == elements


@pytest.mark.parametrize("n", [0, -3, 2.5, True])
def test_unit_square_rejects_bad_size(n):
    """Test that the cell count must be a positive integer."""
    with pytest.raises(MeshError, match="positive integer"):
        unit_square_mesh(n)


def test_unit_square_geometry():
    """Test node numbering, orientation and total area."""
    # Act
    mesh = unit_square_mesh(4)

    # Assert
    assert mesh.nodes[6].tolist() == [0.25, 0.25]
    assert mesh.elements[:2].tolist() == [[0, 1, 6], [0, 6, 5]]
    assert np.all(mesh.areas() > 0)
    assert abs(mesh.total_area() - 1.0) <= 1e-12


def test_interior_nodes_have_six_neighbours():
    """Test the connectivity that fixes the ELL row width."""
    # Arrange
    n = 8
    mesh = unit_square_mesh(n)

    # Act
    sp = build_sparsity(mesh)

    # Assert
    interior = [j * (n + 1) + i for j in range(1, n) for i in range(1, n)]
    assert (sp.row_lengths[interior] == 7).all()
    assert sp.max_nz == 7


def test_write_then_read_is_exact(tmp_path):
    """Test that a written mesh reads back identically."""
    # Arrange
    mesh = unit_square_mesh(3)

    # Act
    path = write_mesh(mesh, tmp_path / "square.mesh")
    loaded = read_mesh(path)

    # Assert
    assert loaded.same_as(mesh)
    assert format_mesh(loaded) == path.read_text()


def test_parse_ignores_comments_and_blank_lines():
    """Test the tolerated layout of mesh files."""
    # Act
    mesh, flipped = parse_mesh(SQUARE)

    # Assert
    assert flipped == 0
    assert mesh.n_nodes == 4
    assert mesh.elements.tolist() == [[0, 1, 2], [0, 2, 3]]


def test_parse_reorients_clockwise_elements():
    """Test that clockwise triangles are swapped and counted."""
    # Arrange
    text = SQUARE.replace("0 2 3\n", "0 3 2\n")

    # Act
    mesh, flipped = parse_mesh(text)

    # Assert
    assert flipped == 1
    assert mesh.elements[1].tolist() == [0, 2, 3]


def test_parse_reports_out_of_range_index_with_line():
    """Test the error for an element referencing a missing node."""
    # Arrange
    text = SQUARE.replace("0 2 3\n", "0 2 999\n")

    # Act
    with pytest.raises(MeshFormatError) as excinfo:
        parse_mesh(text)

    # Assert
    assert excinfo.value.line == 10
    assert "node index 999 outside 0..3" in str(excinfo.value)


@pytest.mark.parametrize("text, line", [
    ("nodes 2\n0 0\n", 3),
    ("nodes x\n", 1),
    ("nodes 1\n0 zero\nelements 0\n", 2),
    ("nodes 1\n0 0 0\nelements 0\n", 2),
    ("nodes 3\n0 0\n1 0\n0 1\nelements 1\n0 1 1\n", 6),
    ("nodes 1\n0 0\nelements 0\nextra\n", 4),
    ("nodes 1\ninf 0\nelements 0\n", 2),
])
def test_parse_errors_carry_line_numbers(text, line):
    """Test malformed files."""
    with pytest.raises(MeshFormatError) as excinfo:
        parse_mesh(text)
    assert excinfo.value.line == line
