"""
Weak forms of the generalized Helmholtz problem and their instantiation into
per-entry integrands on the reference triangle.

The problem is  -div(sigma grad u) + lambda u = f  with homogeneous Neumann
data, whose weak form is  (grad v, sigma grad u) + lambda (v, u) = (v, f).
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union

from ..errors import WeakFormError
from ..symbolic import (
    KERNEL_ARGUMENTS,
    Expr,
    as_expr,
    cos,
    diff,
    free_symbols,
    parse,
    power,
    sqrt,
    substitute,
)
from .reference import ETA, XI, affine_map, reference_shape_functions
from .space import (
    BILINEAR_SYMBOLS,
    LINEAR_SYMBOLS,
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

Integrand = Union[Expr, Callable[..., Expr]]


def _check_symbols(e: Expr, allowed: frozenset, what: str) -> None:
    extra = free_symbols(e) - allowed
    if extra:
        raise WeakFormError(
            f"{what} integrand references {sorted(extra)}; allowed symbols are {sorted(allowed)}")


@dataclass(frozen=True, eq=False)
class WeakForm:
    """Bilinear and linear integrands over the reserved trial/test symbols."""
    bilinear: Expr
    linear: Expr
    space: FunctionSpace

    def __post_init__(self):
        object.__setattr__(self, "bilinear", as_expr(self.bilinear))
        object.__setattr__(self, "linear", as_expr(self.linear))
        _check_symbols(self.bilinear, BILINEAR_SYMBOLS, "Bilinear")
        _check_symbols(self.linear, LINEAR_SYMBOLS, "Linear")

    @classmethod
    def build(cls, space: FunctionSpace, bilinear: Integrand, linear: Integrand) -> "WeakForm":
        """
        Build a weak form from expressions or from callables.

        Args:
            space: The function space of trial and test functions
            bilinear: Expression over the reserved symbols, or ``fn(u, v)``
            linear: Expression over ``v, x, y``, or ``fn(v)``

        Returns:
            The validated weak form
        """
        if callable(bilinear):
            bilinear = bilinear(U, V)
        if callable(linear):
            linear = linear(V)
        return cls(bilinear, linear, space)

    @property
    def n_local(self) -> int:
        return self.space.n_local


@dataclass(frozen=True, eq=False)
class InstantiatedForm:
    """
    Quadrature integrands of the local matrix and vector of one element.

    Every entry is an expression over the kernel arguments
    ``xi, eta, x0, y0, x1, y1, x2, y2`` and already includes |det J|.
    """
    bilinear: Tuple[Tuple[Expr, ...], ...]
    linear: Tuple[Expr, ...]

    def __post_init__(self):
        n = len(self.linear)
        if len(self.bilinear) != n or any(len(row) != n for row in self.bilinear):
            raise WeakFormError(f"Expected {n}x{n} bilinear entries for {n} linear entries")
        allowed = frozenset(KERNEL_ARGUMENTS)
        for entry in self.entries():
            _check_symbols(entry, allowed, "Instantiated")

    @property
    def n_local(self) -> int:
        return len(self.linear)

    def entries(self) -> Tuple[Expr, ...]:
        """All entries: bilinear row-major, then linear."""
        return tuple(e for row in self.bilinear for e in row) + tuple(self.linear)


def _physical_gradients(amap) -> Tuple[Tuple[Expr, Expr], ...]:
    (j00, j01), (j10, j11) = amap.jacobian
    det = amap.det
    result = []
    for phi in reference_shape_functions():
        d_xi, d_eta = diff(phi, XI), diff(phi, ETA)
        result.append(((j11 * d_xi - j10 * d_eta) / det,
                       (j00 * d_eta - j01 * d_xi) / det))
    return tuple(result)


def instantiate(wf: WeakForm) -> InstantiatedForm:
    """
    Substitute shape functions and the affine map into a weak form.

    Entry (i, j) of the bilinear part takes u from basis function j and v
    from basis function i; every entry is multiplied by |det J| and the
    quadrature weight is left to the evaluation.

    Args:
        wf: A validated weak form

    Returns:
        The instantiated form
    """
    amap = affine_map()
    phis = reference_shape_functions()
    grads = _physical_gradients(amap)
    abs_det = sqrt(power(amap.det, 2))
    geometry = {X: amap.x, Y: amap.y}

    bilinear = []
    for i in range(len(phis)):
        row = []
        for j in range(len(phis)):
            bindings = dict(geometry)
            bindings.update({U: phis[j], U_X: grads[j][0], U_Y: grads[j][1],
                             V: phis[i], V_X: grads[i][0], V_Y: grads[i][1]})
            row.append(substitute(wf.bilinear, bindings) * abs_det)
        bilinear.append(tuple(row))
    linear = tuple(substitute(wf.linear, {V: phi, **geometry}) * abs_det for phi in phis)
    logging.info(f"Instantiated weak form into {len(phis) ** 2} bilinear and {len(phis)} linear entries")
    return InstantiatedForm(tuple(bilinear), linear)


@dataclass(frozen=True, eq=False)
class PdeProblem:
    """
    Generalized Helmholtz problem data.

    Attributes:
        sigma: 2x2 coefficient matrix of expressions in x, y
        lam: Reaction coefficient
        f: Right-hand side in x, y
        exact: Exact solution when known (manufactured problems)
        name: Label used in reports
    """
    sigma: Tuple[Tuple[Expr, Expr], Tuple[Expr, Expr]]
    lam: Expr
    f: Expr
    exact: Optional[Expr] = None
    name: str = "custom"

    def __post_init__(self):
        sigma = tuple(tuple(as_expr(e) for e in row) for row in self.sigma)
        if len(sigma) != 2 or any(len(row) != 2 for row in sigma):
            raise ValueError("sigma must be a 2x2 matrix")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "lam", as_expr(self.lam))
        object.__setattr__(self, "f", as_expr(self.f))
        if self.exact is not None:
            object.__setattr__(self, "exact", as_expr(self.exact))

    @classmethod
    def from_strings(cls, sigma: Sequence[str], lam: Union[float, str], f: str,
                     exact: Optional[str] = None, name: str = "custom") -> "PdeProblem":
        """Parse every coefficient from script text."""
        if len(sigma) != 4:
            raise ValueError(f"sigma needs 4 entries, got {len(sigma)}")
        s = [parse(text) for text in sigma]
        lam = parse(lam) if isinstance(lam, str) else lam
        return cls(((s[0], s[1]), (s[2], s[3])), lam, parse(f),
                   parse(exact) if exact else None, name)

    def weak_form(self, space: Optional[FunctionSpace] = None) -> WeakForm:
        """(grad v, sigma grad u) + lam (v, u) = (v, f)."""
        space = space or FunctionSpace()
        return WeakForm.build(
            space,
            lambda u, v: dot(grad(v), matvec(self.sigma, grad(u))) + self.lam * u * v,
            lambda v: v * self.f,
        )


def demo_problem() -> PdeProblem:
    """sigma = [[1, -x-y], [x+y, 1]], lambda = 1, f = -2(x^2 + y^2) + 36."""
    return PdeProblem(((1, -X - Y), (X + Y, 1)), 1, -2 * (X ** 2 + Y ** 2) + 36, name="demo")


def cosine_problem() -> PdeProblem:
    """Manufactured u = cos(pi x) cos(pi y) with sigma = I, lambda = 1."""
    exact = cos(math.pi * X) * cos(math.pi * Y)
    f = (2 * math.pi ** 2 + 1) * exact
    return PdeProblem(((1, 0), (0, 1)), 1, f, exact=exact, name="cosine")
