"""
Structured mesh generation and mesh file I/O.
"""
from .generator import unit_square_mesh
from .io import format_mesh, parse_mesh, read_mesh, write_mesh

__all__ = ["format_mesh", "parse_mesh", "read_mesh", "unit_square_mesh", "write_mesh"]
