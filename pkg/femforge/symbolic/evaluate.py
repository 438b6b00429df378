"""
Tree-walking numeric evaluation of expressions.

Children are evaluated left to right. A product is evaluated as
``coefficient * numerator factors`` followed by one division by the product of
the denominator factors, which is the same operation sequence the kernel
lowering emits.
"""
from typing import List, Mapping, NamedTuple, Optional, Tuple, Union

import numpy as np

from ..errors import ExpressionError, UnboundSymbolError
from .expr import Expr, Kind
from .numeric import ArrayBackend, ScalarBackend, ipow

Bindings = Mapping[Union[str, Expr], object]


class ProductParts(NamedTuple):
    coefficient: Optional[Expr]
    numerator: List[Tuple[Expr, int]]
    denominator: List[Tuple[Expr, int]]


def split_product(node: Expr) -> ProductParts:
    """Split a MUL node into coefficient, positive powers and negative powers."""
    args = node.args
    coefficient = None
    if args[0].kind is Kind.CONST:
        coefficient, args = args[0], args[1:]
    numerator, denominator = [], []
    for factor in args:
        if factor.kind is Kind.POW:
            base, n = factor.args[0], factor.exponent
        else:
            base, n = factor, 1
        if n > 0:
            numerator.append((base, n))
        else:
            denominator.append((base, -n))
    return ProductParts(coefficient, numerator, denominator)


def _normalize(values: Bindings) -> dict:
    return {(k.name if isinstance(k, Expr) else k): v for k, v in values.items()}


def _walk(node: Expr, values: dict, backend):
    kind = node.kind
    if kind is Kind.CONST:
        return backend.const(node.value)
    if kind is Kind.SYMBOL:
        try:
            return values[node.name]
        except KeyError:
            raise UnboundSymbolError(node.name) from None
    if kind is Kind.ADD:
        acc = _walk(node.args[0], values, backend)
        for term in node.args[1:]:
            acc = acc + _walk(term, values, backend)
        return acc
    if kind is Kind.MUL:
        parts = split_product(node)
        numer = [] if parts.coefficient is None else [backend.const(parts.coefficient.value)]
        numer += [ipow(_walk(b, values, backend), n) for b, n in parts.numerator]
        acc = _fold(numer) if numer else backend.const(1)
        if parts.denominator:
            den = _fold([ipow(_walk(b, values, backend), n) for b, n in parts.denominator])
            acc = backend.div(acc, den)
        return acc
    if kind is Kind.POW:
        base = _walk(node.args[0], values, backend)
        if node.exponent > 0:
            return ipow(base, node.exponent)
        return backend.div(backend.const(1), ipow(base, -node.exponent))
    if kind is Kind.SIN:
        return backend.sin(_walk(node.args[0], values, backend))
    if kind is Kind.COS:
        return backend.cos(_walk(node.args[0], values, backend))
    if kind is Kind.SQRT:
        return backend.sqrt(_walk(node.args[0], values, backend))
    raise ExpressionError(f"Cannot evaluate node kind {kind}")


def _fold(items: list):
    acc = items[0]
    for item in items[1:]:
        acc = acc * item
    return acc


def evaluate(e: Expr, values: Bindings) -> float:
    """
    Evaluate ``e`` in IEEE double precision.

    Args:
        e: Expression to evaluate
        values: Symbol name (or symbol node) to float

    Returns:
        The value; division by zero yields inf/nan rather than raising

    Raises:
        UnboundSymbolError: If a free symbol of ``e`` has no value
    """
    scalars = {k: float(v) for k, v in _normalize(values).items()}
    return float(_walk(e, scalars, ScalarBackend))


def evaluate_array(e: Expr, values: Bindings) -> np.ndarray:
    """Evaluate ``e`` elementwise over broadcastable float64 arrays."""
    arrays = {k: np.asarray(v, dtype=np.float64) for k, v in _normalize(values).items()}
    shape = np.broadcast_shapes(*(a.shape for a in arrays.values())) if arrays else ()
    with np.errstate(all="ignore"):
        result = _walk(e, arrays, ArrayBackend)
    return np.array(np.broadcast_to(result, shape), dtype=np.float64)
