"""
Matrix containers, conjugate gradients, error norms and export formats.
"""
from .cg import CGResult, cg_solve
from .export import FORMATS, export, export_vector, import_matrix, import_vector
from .matrices import PAD, DenseMatrix, EllMatrix, Matrix, matvec
from .norms import interpolate, l2_error

__all__ = [
    "CGResult",
    "DenseMatrix",
    "EllMatrix",
    "FORMATS",
    "Matrix",
    "PAD",
    "cg_solve",
    "export",
    "export_vector",
    "import_matrix",
    "import_vector",
    "interpolate",
    "l2_error",
    "matvec",
]
