"""
Discretization error norms of P1 solutions.
"""
from typing import Optional

import numpy as np

from ..fem.mesh import Mesh
from ..fem.reference import QuadratureRule, quadrature_rule
from ..symbolic import Expr, evaluate_array, free_symbols


def interpolate(u: Expr, m: Mesh) -> np.ndarray:
    """Nodal values of ``u`` (an expression in x, y) on ``m``."""
    return evaluate_array(u, {"x": m.nodes[:, 0], "y": m.nodes[:, 1]})


def l2_error(x: np.ndarray, u_exact: Expr, m: Mesh, rule: Optional[QuadratureRule] = None) -> float:
    """
    L2 norm of (u_h - u_exact) over the mesh.

    Args:
        x: Nodal values of the discrete solution u_h
        u_exact: Exact solution in x, y
        m: The mesh
        rule: Quadrature rule per element (default degree 2)

    Returns:
        sqrt of the sum over elements of the quadrature of (u_h - u_exact)^2
    """
    extra = free_symbols(u_exact) - {"x", "y"}
    if extra:
        raise ValueError(f"Exact solution may only use x and y, found {sorted(extra)}")
    rule = rule or quadrature_rule(2)
    x = np.asarray(x, dtype=np.float64)
    p = m.nodes[m.elements]
    u = x[m.elements]
    jac = np.abs((p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
                 - (p[:, 2, 0] - p[:, 0, 0]) * (p[:, 1, 1] - p[:, 0, 1]))
    total = 0.0
    for (xi, eta), w in zip(rule.points, rule.weights):
        phi = np.array([1.0 - xi - eta, xi, eta])
        point = phi @ p
        u_h = u @ phi
        diff = u_h - evaluate_array(u_exact, {"x": point[:, 0], "y": point[:, 1]})
        total += float(w) * float(np.sum(diff * diff * jac))
    return float(np.sqrt(total))
