"""
Structural operations on canonical expressions: free symbols,
differentiation, simultaneous substitution and expansion.
"""
from fractions import Fraction
from typing import Dict, FrozenSet, List, Mapping, Union

from ..errors import ExpressionError
from .expr import (
    ONE,
    ZERO,
    Expr,
    Kind,
    add,
    as_expr,
    cos,
    mul,
    power,
    rebuild,
    sin,
    sym,
)


def free_symbols(e: Expr) -> FrozenSet[str]:
    """Names of all symbols occurring in ``e`` (cached per node)."""
    cached = e._free
    if cached is not None:
        return cached
    if e.kind is Kind.SYMBOL:
        result = frozenset((e.name,))
    elif e.kind is Kind.CONST:
        result = frozenset()
    else:
        result = frozenset().union(*(free_symbols(a) for a in e.args))
    object.__setattr__(e, "_free", result)
    return result


def _symbol(s: Union[Expr, str]) -> Expr:
    if isinstance(s, str):
        return sym(s)
    if not isinstance(s, Expr) or s.kind is not Kind.SYMBOL:
        raise ExpressionError(f"Expected a symbol, got {s!r}")
    return s


def diff(e: Expr, s: Union[Expr, str]) -> Expr:
    """
    Exact partial derivative of ``e`` with respect to the symbol ``s``.

    Args:
        e: The expression to differentiate
        s: A symbol node or symbol name

    Returns:
        The canonical derivative; 0 when ``s`` does not occur in ``e``
    """
    s = _symbol(s)
    memo: Dict[Expr, Expr] = {}

    def d(node: Expr) -> Expr:
        if s.name not in free_symbols(node):
            return ZERO
        done = memo.get(node)
        if done is not None:
            return done
        kind = node.kind
        if kind is Kind.SYMBOL:
            result = ONE
        elif kind is Kind.ADD:
            result = add(*(d(a) for a in node.args))
        elif kind is Kind.MUL:
            terms = []
            for i, factor in enumerate(node.args):
                df = d(factor)
                if df is not ZERO:
                    terms.append(mul(*node.args[:i], df, *node.args[i + 1:]))
            result = add(*terms)
        elif kind is Kind.POW:
            base, n = node.args[0], node.exponent
            result = mul(n, power(base, n - 1), d(base))
        elif kind is Kind.SIN:
            result = mul(cos(node.args[0]), d(node.args[0]))
        elif kind is Kind.COS:
            result = mul(-1, sin(node.args[0]), d(node.args[0]))
        elif kind is Kind.SQRT:
            result = mul(Fraction(1, 2), power(node, -1), d(node.args[0]))
        else:
            raise ExpressionError(f"Cannot differentiate node kind {kind}")
        memo[node] = result
        return result

    return d(e)


def substitute(e: Expr, bindings: Mapping[Union[Expr, str], object]) -> Expr:
    """
    Replace symbols simultaneously, then re-canonicalize.

    Substituted values are never themselves substituted into, so
    ``{x: y, y: x}`` swaps the two symbols.
    """
    table: Dict[str, Expr] = {_symbol(k).name: as_expr(v) for k, v in bindings.items()}
    if not table:
        return e
    names = frozenset(table)
    memo: Dict[Expr, Expr] = {}

    def visit(node: Expr) -> Expr:
        if not (free_symbols(node) & names):
            return node
        done = memo.get(node)
        if done is not None:
            return done
        if node.kind is Kind.SYMBOL:
            result = table[node.name]
        else:
            args = [visit(a) for a in node.args]
            if all(new is old for new, old in zip(args, node.args)):
                result = node
            else:
                result = rebuild(node, args)
        memo[node] = result
        return result

    return visit(e)


def _distribute(left: List[Expr], right: List[Expr]) -> List[Expr]:
    return [mul(a, b) for a in left for b in right]


def _terms(e: Expr) -> List[Expr]:
    return list(e.args) if e.kind is Kind.ADD else [e]


def expand(e: Expr) -> Expr:
    """Distribute products over sums and expand positive integer powers of sums."""
    memo: Dict[Expr, Expr] = {}

    def visit(node: Expr) -> Expr:
        if not node.args:
            return node
        done = memo.get(node)
        if done is not None:
            return done
        kind = node.kind
        if kind is Kind.ADD:
            result = add(*(visit(a) for a in node.args))
        elif kind is Kind.MUL:
            terms = [ONE]
            for factor in node.args:
                terms = _distribute(terms, _terms(visit(factor)))
            result = add(*terms)
        elif kind is Kind.POW:
            base = visit(node.args[0])
            n = node.exponent
            if n > 0 and base.kind is Kind.ADD:
                terms = [ONE]
                for _ in range(n):
                    terms = _terms(add(*_distribute(terms, list(base.args))))
                result = add(*terms)
            else:
                result = power(base, n)
        else:
            result = rebuild(node, [visit(a) for a in node.args])
        memo[node] = result
        return result

    return visit(e)

