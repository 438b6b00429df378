"""
Deterministic, fully parenthesized infix rendering of expressions.

The output is accepted by ``parse`` and evaluates to the same value.
"""
import math
from fractions import Fraction

from .evaluate import split_product
from .expr import Expr, Kind


def _number(value) -> str:
    if isinstance(value, Fraction):
        if value.denominator == 1:
            n = value.numerator
            return str(n) if n >= 0 else f"({n})"
        return f"({value.numerator} / {value.denominator})" if value > 0 \
            else f"(({value.numerator}) / {value.denominator})"
    if math.isinf(value):
        text = "1e999"
    elif math.isnan(value):
        text = "nan"
    else:
        text = repr(abs(value))
    return f"(-{text})" if value < 0 else text


def _power(base: str, n: int) -> str:
    return base if n == 1 else f"({base} ^ {n})"


def _product(items) -> str:
    return items[0] if len(items) == 1 else "(" + " * ".join(items) + ")"


def to_string(e: Expr) -> str:
    """Render ``e`` as text, e.g. ``((2 * x) + sin(y))``."""
    kind = e.kind
    if kind is Kind.CONST:
        return _number(e.value)
    if kind is Kind.SYMBOL:
        return e.name
    if kind is Kind.ADD:
        return "(" + " + ".join(to_string(a) for a in e.args) + ")"
    if kind is Kind.MUL:
        parts = split_product(e)
        numer = [] if parts.coefficient is None else [_number(parts.coefficient.value)]
        numer += [_power(to_string(b), n) for b, n in parts.numerator]
        if not parts.denominator:
            return _product(numer)
        den = [_power(to_string(b), n) for b, n in parts.denominator]
        return f"({_product(numer) if numer else '1'} / {_product(den)})"
    if kind is Kind.POW:
        base = to_string(e.args[0])
        if e.exponent > 0:
            return _power(base, e.exponent)
        return f"(1 / {_power(base, -e.exponent)})"
    return f"{kind.value}({to_string(e.args[0])})"
