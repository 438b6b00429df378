"""
Immutable, hash-consed symbolic expressions.

Every constructor in this module returns a canonical expression:

* sums and products are flattened, constants folded, children sorted by a
  structural total order, like terms / equal bases collected;
* ``x + 0 -> x``, ``x * 1 -> x``, ``x * 0 -> 0``, ``x ^ 1 -> x``, ``x ^ 0 -> 1``;
* negation is a product with coefficient -1 and a quotient ``a / b`` is the
  product ``a * b^-1``, so only eight node kinds exist after construction.

Structurally equal canonical expressions are the same Python object, so
equality is an identity test.
"""
import math
import re
import threading
import weakref
from enum import Enum
from fractions import Fraction
from functools import cmp_to_key
from typing import Dict, Iterable, Optional, Tuple, Union

from ..errors import ExpressionError, InvalidSymbolError, SymbolicZeroDivisionError
from .numeric import ieee_cos, ieee_div, ieee_sin, ieee_sqrt, ipow

IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class Kind(str, Enum):
    CONST = "const"
    SYMBOL = "symbol"
    ADD = "add"
    MUL = "mul"
    POW = "pow"
    SIN = "sin"
    COS = "cos"
    SQRT = "sqrt"


UNARY_FUNCTIONS = (Kind.SIN, Kind.COS, Kind.SQRT)

_RANK = {
    Kind.CONST: 0,
    Kind.SYMBOL: 1,
    Kind.POW: 2,
    Kind.MUL: 3,
    Kind.ADD: 4,
    Kind.SIN: 5,
    Kind.COS: 6,
    Kind.SQRT: 7,
}

Number = Union[Fraction, float]
ExprLike = Union["Expr", int, float, Fraction]

_table: "weakref.WeakValueDictionary" = weakref.WeakValueDictionary()
_table_lock = threading.Lock()


def _const_payload(value: Number) -> tuple:
    if isinstance(value, Fraction):
        return ("q", value.numerator, value.denominator)
    return ("f", value.hex())


class Expr:
    """A canonical expression node. Build with the module constructors."""

    __slots__ = ("kind", "args", "value", "name", "exponent",
                 "_hash", "_head", "_tail", "_free", "__weakref__")

    def __init__(self, kind: Kind, args: Tuple["Expr", ...], value: Optional[Number],
                 name: Optional[str], exponent: Optional[int], payload: tuple):
        setattr_ = object.__setattr__
        setattr_(self, "kind", kind)
        setattr_(self, "args", args)
        setattr_(self, "value", value)
        setattr_(self, "name", name)
        setattr_(self, "exponent", exponent)
        setattr_(self, "_hash", hash((kind.value, payload, tuple(a._hash for a in args))))
        # sort order: head, then children left to right, then tail
        if kind is Kind.POW:
            setattr_(self, "_head", (_RANK[kind],))
            setattr_(self, "_tail", exponent)
        else:
            setattr_(self, "_head", (_RANK[kind], payload))
            setattr_(self, "_tail", len(args))
        setattr_(self, "_free", None)

    def __setattr__(self, attr, value):
        raise AttributeError("Expr is immutable")

    def __hash__(self):
        return self._hash

    @property
    def sort_key(self):
        return _sort_key(self)

    @property
    def is_constant(self) -> bool:
        return self.kind is Kind.CONST

    @property
    def is_symbol(self) -> bool:
        return self.kind is Kind.SYMBOL

    def __float__(self) -> float:
        if self.kind is not Kind.CONST:
            raise ExpressionError(f"Expression {self} is not a constant")
        return float(self.value)

    # Python operators build canonical expressions.
    def __add__(self, other: ExprLike) -> "Expr":
        return add(self, other)

    def __radd__(self, other: ExprLike) -> "Expr":
        return add(other, self)

    def __sub__(self, other: ExprLike) -> "Expr":
        return sub(self, other)

    def __rsub__(self, other: ExprLike) -> "Expr":
        return sub(other, self)

    def __mul__(self, other: ExprLike) -> "Expr":
        return mul(self, other)

    def __rmul__(self, other: ExprLike) -> "Expr":
        return mul(other, self)

    def __truediv__(self, other: ExprLike) -> "Expr":
        return div(self, other)

    def __rtruediv__(self, other: ExprLike) -> "Expr":
        return div(other, self)

    def __pow__(self, other: ExprLike) -> "Expr":
        return power(self, _integer_exponent(other))

    def __neg__(self) -> "Expr":
        return neg(self)

    def __pos__(self) -> "Expr":
        return self

    def __str__(self) -> str:
        from .printer import to_string
        return to_string(self)

    def __repr__(self) -> str:
        return f"Expr({str(self)!r})"


def _intern(kind: Kind, args: Tuple[Expr, ...] = (), value: Optional[Number] = None,
            name: Optional[str] = None, exponent: Optional[int] = None) -> Expr:
    if kind is Kind.CONST:
        payload = _const_payload(value)
    elif kind is Kind.SYMBOL:
        payload = ("s", name)
    elif kind is Kind.POW:
        payload = ("e", exponent)
    else:
        payload = ()
    table_key = (kind, payload, args)
    with _table_lock:
        node = _table.get(table_key)
        if node is None:
            node = Expr(kind, args, value, name, exponent, payload)
            _table[table_key] = node
        return node


# --- numbers --------------------------------------------------------------

def _as_number(value) -> Number:
    if isinstance(value, bool):
        raise ExpressionError("Booleans are not numeric constants")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return 0.0 if value == 0.0 else value
    raise ExpressionError(f"Cannot convert {value!r} to a constant")


def _num_add(a: Number, b: Number) -> Number:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a + b
    return _as_number(float(a) + float(b))


def _num_mul(a: Number, b: Number) -> Number:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a * b
    return _as_number(float(a) * float(b))


def _num_pow(a: Number, n: int) -> Number:
    if a == 0 and n < 0:
        raise SymbolicZeroDivisionError("Negative power of the constant zero")
    if isinstance(a, Fraction):
        return a ** n
    if n < 0:
        return _as_number(ieee_div(1.0, float(ipow(a, -n))))
    return _as_number(float(ipow(a, n)))


def const(value) -> Expr:
    """Constant node: exact rational for int/Fraction input, float otherwise."""
    return _intern(Kind.CONST, value=_as_number(value))


ZERO = const(0)
ONE = const(1)
MINUS_ONE = const(-1)


def as_expr(value: ExprLike) -> Expr:
    if isinstance(value, Expr):
        return value
    return const(value)


def sym(name: str) -> Expr:
    """Symbol node; the same name always yields the same object."""
    if not isinstance(name, str) or not IDENTIFIER.match(name):
        raise InvalidSymbolError(f"Invalid symbol name: {name!r}")
    return _intern(Kind.SYMBOL, name=name)


def _integer_exponent(value: ExprLike) -> int:
    if isinstance(value, bool):
        raise ExpressionError("Exponent must be an integer constant")
    if isinstance(value, int):
        return value
    node = as_expr(value)
    if node.kind is Kind.CONST and isinstance(node.value, Fraction) and node.value.denominator == 1:
        return int(node.value)
    raise ExpressionError(f"Exponent must be an integer constant, got {value}")


# --- sums -------------------------------------------------------------------

def split_coefficient(term: Expr) -> Tuple[Number, Expr]:
    """Split a term into (numeric coefficient, coefficient-free monomial)."""
    if term.kind is Kind.CONST:
        return term.value, ONE
    if term.kind is Kind.MUL and term.args[0].kind is Kind.CONST:
        rest = term.args[1:]
        return term.args[0].value, rest[0] if len(rest) == 1 else _intern(Kind.MUL, rest)
    return Fraction(1), term


def add(*terms: ExprLike) -> Expr:
    constant: Number = Fraction(0)
    coefficients: Dict[Expr, Number] = {}
    pending = [as_expr(t) for t in terms]
    while pending:
        term = pending.pop()
        if term.kind is Kind.ADD:
            pending.extend(term.args)
        elif term.kind is Kind.CONST:
            constant = _num_add(constant, term.value)
        else:
            coeff, monomial = split_coefficient(term)
            previous = coefficients.get(monomial)
            coefficients[monomial] = coeff if previous is None else _num_add(previous, coeff)

    children = []
    if constant != 0:
        children.append(const(constant))
    for monomial in sorted((m for m, c in coefficients.items() if c != 0), key=_sort_key):
        children.append(_scale(monomial, coefficients[monomial]))
    if not children:
        return ZERO
    if len(children) == 1:
        return children[0]
    return _intern(Kind.ADD, tuple(children))


def _scale(monomial: Expr, coeff: Number) -> Expr:
    if coeff == 1:
        return monomial
    return mul(const(coeff), monomial)


def compare_nodes(a: Expr, b: Expr) -> int:
    """
    Structural total order of canonical expressions, as -1, 0 or 1.

    Walks both trees with an explicit stack; shared subtrees are skipped by
    identity, so deep expressions need neither recursion nor nested keys.
    """
    pending = [(a, b)]
    while pending:
        x, y = pending.pop()
        if x is y:
            continue
        if not isinstance(x, Expr):
            # tails of two nodes whose heads and children matched
            if x != y:
                return -1 if x < y else 1
            continue
        if x._head != y._head:
            return -1 if x._head < y._head else 1
        pending.append((x._tail, y._tail))
        pending.extend(reversed(tuple(zip(x.args, y.args))))
    return 0


_sort_key = cmp_to_key(compare_nodes)


def neg(a: ExprLike) -> Expr:
    return mul(MINUS_ONE, a)


def sub(a: ExprLike, b: ExprLike) -> Expr:
    return add(a, neg(b))


# --- products ---------------------------------------------------------------

def split_power(node: Expr) -> Tuple[Expr, int]:
    """Split a factor into (base, integer exponent)."""
    if node.kind is Kind.POW:
        return node.args[0], node.exponent
    return node, 1


def mul(*factors: ExprLike) -> Expr:
    coeff: Number = Fraction(1)
    exponents: Dict[Expr, int] = {}
    pending = [as_expr(f) for f in factors]
    while pending:
        factor = pending.pop()
        if factor.kind is Kind.MUL:
            pending.extend(factor.args)
        elif factor.kind is Kind.CONST:
            coeff = _num_mul(coeff, factor.value)
        else:
            base, n = split_power(factor)
            exponents[base] = exponents.get(base, 0) + n

    if coeff == 0:
        return ZERO
    children = [_raw_power(base, exponents[base])
                for base in sorted((b for b, n in exponents.items() if n != 0), key=_sort_key)]
    if not children:
        return const(coeff)
    if coeff != 1:
        children.insert(0, const(coeff))
    if len(children) == 1:
        return children[0]
    return _intern(Kind.MUL, tuple(children))


def _raw_power(base: Expr, n: int) -> Expr:
    # base is never a constant, product or power here
    if n == 1:
        return base
    return _intern(Kind.POW, (base,), exponent=n)


def div(a: ExprLike, b: ExprLike) -> Expr:
    b = as_expr(b)
    if b.kind is Kind.CONST and b.value == 0:
        raise SymbolicZeroDivisionError("Division by the constant zero")
    return mul(a, power(b, -1))


def power(base: ExprLike, n: int) -> Expr:
    base = as_expr(base)
    n = _integer_exponent(n)
    if n == 0:
        return ONE
    if n == 1:
        return base
    if base.kind is Kind.CONST:
        return const(_num_pow(base.value, n))
    if base.kind is Kind.POW:
        return power(base.args[0], base.exponent * n)
    if base.kind is Kind.MUL:
        return mul(*(power(f, n) for f in base.args))
    return _intern(Kind.POW, (base,), exponent=n)


# --- unary functions ----------------------------------------------------------

def _fold_unary(kind: Kind, value: Number) -> Optional[Number]:
    if kind is Kind.SIN:
        return Fraction(0) if value == 0 else _as_number(ieee_sin(float(value)))
    if kind is Kind.COS:
        return Fraction(1) if value == 0 else _as_number(ieee_cos(float(value)))
    if isinstance(value, Fraction) and value >= 0:
        num, den = math.isqrt(value.numerator), math.isqrt(value.denominator)
        if num * num == value.numerator and den * den == value.denominator:
            return Fraction(num, den)
    return _as_number(ieee_sqrt(float(value)))


def unary(kind: Kind, arg: ExprLike) -> Expr:
    if kind not in UNARY_FUNCTIONS:
        raise ExpressionError(f"Not a unary function: {kind}")
    arg = as_expr(arg)
    if arg.kind is Kind.CONST:
        return const(_fold_unary(kind, arg.value))
    return _intern(kind, (arg,))


def sin(arg: ExprLike) -> Expr:
    return unary(Kind.SIN, arg)


def cos(arg: ExprLike) -> Expr:
    return unary(Kind.COS, arg)


def sqrt(arg: ExprLike) -> Expr:
    return unary(Kind.SQRT, arg)


# --- generic interface ---------------------------------------------------------

_BINARY = {
    "+": add,
    "-": sub,
    "*": mul,
    "/": div,
}


def arith(a: ExprLike, op: str, b: ExprLike) -> Expr:
    """Apply one of ``+ - * / ^`` and return the canonical result."""
    if op == "^":
        return power(a, _integer_exponent(b))
    try:
        return _BINARY[op](a, b)
    except KeyError:
        raise ExpressionError(f"Unsupported operator: {op}") from None


def rebuild(node: Expr, args: Iterable[Expr]) -> Expr:
    """Rebuild ``node`` of the same kind over new children, canonically."""
    args = tuple(args)
    kind = node.kind
    if kind is Kind.ADD:
        return add(*args)
    if kind is Kind.MUL:
        return mul(*args)
    if kind is Kind.POW:
        return power(args[0], node.exponent)
    if kind in UNARY_FUNCTIONS:
        return unary(kind, args[0])
    return node


def canonicalize(node: Expr) -> Expr:
    """Rebuild bottom-up through the constructors (idempotent on canonical input)."""
    memo: Dict[Expr, Expr] = {}

    def visit(n: Expr) -> Expr:
        done = memo.get(n)
        if done is None:
            done = rebuild(n, [visit(a) for a in n.args]) if n.args else n
            memo[n] = done
        return done

    return visit(node)


def interned_count() -> int:
    """Number of live interned nodes (diagnostics)."""
    with _table_lock:
        return len(_table)
