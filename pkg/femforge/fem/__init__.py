"""
P1 finite elements: meshes, reference element, weak forms and instantiation.
"""
from .mesh import Mesh, orient_elements, signed_areas
from .reference import (
    ETA,
    XI,
    AffineMap,
    QuadratureRule,
    affine_map,
    quadrature_rule,
    reference_shape_functions,
)
from .space import (
    U,
    U_X,
    U_Y,
    V,
    V_X,
    V_Y,
    X,
    Y,
    FunctionSpace,
    dot,
    grad,
    matvec,
)
from .weakform import (
    InstantiatedForm,
    PdeProblem,
    WeakForm,
    cosine_problem,
    demo_problem,
    instantiate,
)

__all__ = [
    "AffineMap",
    "ETA",
    "FunctionSpace",
    "InstantiatedForm",
    "Mesh",
    "PdeProblem",
    "QuadratureRule",
    "U",
    "U_X",
    "U_Y",
    "V",
    "V_X",
    "V_Y",
    "WeakForm",
    "X",
    "XI",
    "Y",
    "affine_map",
    "cosine_problem",
    "demo_problem",
    "dot",
    "grad",
    "instantiate",
    "matvec",
    "orient_elements",
    "quadrature_rule",
    "reference_shape_functions",
    "signed_areas",
]
