"""
P1 function spaces and small symbolic vector calculus over them.
"""
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from ..symbolic import Expr, add, as_expr, diff, mul, sym
from .mesh import Mesh

X = sym("x")
Y = sym("y")
U, U_X, U_Y = sym("u"), sym("u_x"), sym("u_y")
V, V_X, V_Y = sym("v"), sym("v_x"), sym("v_y")

BILINEAR_SYMBOLS = frozenset({"u", "u_x", "u_y", "v", "v_x", "v_y", "x", "y"})
LINEAR_SYMBOLS = frozenset({"v", "x", "y"})

# Derivative symbols of the trial and test functions per physical coordinate.
_FIELD_DERIVATIVES = {
    "x": ((U, U_X), (V, V_X)),
    "y": ((U, U_Y), (V, V_Y)),
}


@dataclass(frozen=True, eq=False)
class FunctionSpace:
    """Continuous piecewise-linear Lagrange space on a triangle mesh."""
    mesh: Optional[Mesh] = None
    coords: Tuple[Expr, Expr] = (X, Y)
    family: str = "Lagrange"
    degree: int = 1

    def __post_init__(self):
        if self.family != "Lagrange":
            raise ValueError(f"Unsupported element family: {self.family}")
        if self.degree != 1:
            raise ValueError(f"Unsupported element degree: {self.degree}")
        if tuple(c.name for c in self.coords) != ("x", "y"):
            raise ValueError("Coordinates must be the symbols (x, y)")

    @property
    def n_local(self) -> int:
        return 3


def grad(e, coords: Sequence[Expr] = (X, Y)) -> Tuple[Expr, ...]:
    """
    Gradient of ``e`` with respect to ``coords``.

    The trial and test symbols ``u`` and ``v`` are treated as functions of
    the coordinates, so ``grad(u)`` is ``(u_x, u_y)``.
    """
    e = as_expr(e)
    components = []
    for c in coords:
        component = diff(e, c)
        for field, derivative in _FIELD_DERIVATIVES.get(c.name, ()):
            component = component + diff(e, field) * derivative
        components.append(component)
    return tuple(components)


def dot(a: Sequence, b: Sequence) -> Expr:
    """Symbolic inner product of two equally sized vectors."""
    if len(a) != len(b):
        raise ValueError(f"Dimension mismatch: {len(a)} vs {len(b)}")
    return add(*(mul(p, q) for p, q in zip(a, b)))


def matvec(m: Sequence[Sequence], v: Sequence) -> Tuple[Expr, ...]:
    """Symbolic matrix-vector product."""
    for row in m:
        if len(row) != len(v):
            raise ValueError(f"Dimension mismatch: row of length {len(row)} vs vector of length {len(v)}")
    return tuple(dot(row, v) for row in m)
