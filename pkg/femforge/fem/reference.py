"""
Reference-triangle machinery: P1 shape functions, the affine map to a
physical element and quadrature rules.

The reference triangle has vertices (0, 0), (1, 0), (0, 1).
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Tuple

import numpy as np

from ..symbolic import Expr, evaluate, sym

XI = sym("xi")
ETA = sym("eta")
X0, Y0 = sym("x0"), sym("y0")
X1, Y1 = sym("x1"), sym("y1")
X2, Y2 = sym("x2"), sym("y2")


def reference_shape_functions() -> Tuple[Expr, Expr, Expr]:
    """P1 Lagrange basis on the reference triangle: (1 - xi - eta, xi, eta)."""
    return (1 - XI - ETA, XI, ETA)


class AffineMap(NamedTuple):
    x: Expr
    y: Expr
    jacobian: Tuple[Tuple[Expr, Expr], Tuple[Expr, Expr]]
    det: Expr


def affine_map() -> AffineMap:
    """
    Reference-to-physical map of the triangle (x0, y0), (x1, y1), (x2, y2).

    Returns:
        The mapped coordinates x(xi, eta), y(xi, eta), the constant Jacobian
        [[dx/dxi, dx/deta], [dy/dxi, dy/deta]] and its determinant
    """
    j00, j01 = X1 - X0, X2 - X0
    j10, j11 = Y1 - Y0, Y2 - Y0
    x = X0 + j00 * XI + j01 * ETA
    y = Y0 + j10 * XI + j11 * ETA
    det = j00 * j11 - j01 * j10
    return AffineMap(x, y, ((j00, j01), (j10, j11)), det)


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Points (xi, eta) and weights on the reference triangle; weights sum to 1/2."""
    points: np.ndarray
    weights: np.ndarray
    degree: int

    @property
    def n_points(self) -> int:
        return len(self.weights)

    def integrate(self, e: Expr) -> float:
        """Weighted sum of ``e`` over the rule points (``e`` over xi and eta)."""
        total = 0.0
        for (xi, eta), w in zip(self.points, self.weights):
            total += w * evaluate(e, {"xi": float(xi), "eta": float(eta)})
        return total


def _rule(points, weights, degree: int) -> QuadratureRule:
    points = np.array(points, dtype=np.float64)
    weights = np.array(weights, dtype=np.float64)
    points.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(points, weights, degree)


@lru_cache(maxsize=None)
def quadrature_rule(degree: int = 2) -> QuadratureRule:
    """
    Quadrature rule on the reference triangle exact for polynomials of total
    degree ``degree``.

    Args:
        degree: 1 (centroid), 2 (three interior points, the assembly default)
            or 4 (six points, used for error norms)

    Returns:
        The cached rule

    Raises:
        ValueError: If no rule of that degree is available
    """
    if degree == 1:
        return _rule([[1.0 / 3.0, 1.0 / 3.0]], [0.5], 1)
    if degree == 2:
        sixth = 1.0 / 6.0
        two_thirds = 2.0 / 3.0
        return _rule([[sixth, sixth], [two_thirds, sixth], [sixth, two_thirds]],
                     [sixth, sixth, sixth], 2)
    if degree == 4:
        a, wa = 0.44594849091596488632, 0.22338158967801146570 / 2.0
        b, wb = 0.09157621350977074346, 0.10995174365532186764 / 2.0
        return _rule([[a, a], [1.0 - 2.0 * a, a], [a, 1.0 - 2.0 * a],
                      [b, b], [1.0 - 2.0 * b, b], [b, 1.0 - 2.0 * b]],
                     [wa, wa, wa, wb, wb, wb], 4)
    raise ValueError(f"Unsupported quadrature degree: {degree}")
