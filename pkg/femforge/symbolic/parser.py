"""
Recursive-descent parser for the expression script language.

Grammar::

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := '-' unary | power
    power := atom ('^' unary)?          # right-associative, binds tighter than unary minus
    atom  := NUMBER | IDENT | FUNC '(' expr ')' | '(' expr ')'

Integer literals become exact rationals, literals with a decimal point or an
exponent become floats. ``FUNC`` is one of ``sin``, ``cos``, ``sqrt``.
"""
import re
from fractions import Fraction
from typing import List, NamedTuple

from ..errors import (
    ExpressionError,
    ExpressionSyntaxError,
    SymbolicZeroDivisionError,
    UnknownFunctionError,
)
from .expr import Expr, Kind, arith, const, neg, sym, unary

FUNCTIONS = {"sin": Kind.SIN, "cos": Kind.COS, "sqrt": Kind.SQRT}

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<number>(?:\d+\.\d*|\.\d+)(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+|\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE | re.ASCII)


class Token(NamedTuple):
    kind: str
    text: str
    offset: int


def _utf8_len(text: str) -> int:
    return len(text.encode("utf-8", "surrogatepass"))


def tokenize(src: str) -> List[Token]:
    """Split ``src`` into tokens; offsets count UTF-8 bytes from the start."""
    tokens = []
    pos = 0
    offset = 0
    while pos < len(src):
        match = _TOKEN.match(src, pos)
        if match is None:
            raise ExpressionSyntaxError(f"Unexpected character {src[pos]!r}", offset)
        if match.lastgroup != "ws":
            tokens.append(Token(match.lastgroup, match.group(), offset))
        offset += _utf8_len(match.group())
        pos = match.end()
    tokens.append(Token("eof", "", offset))
    return tokens


class _Parser:

    def __init__(self, src: str):
        self.tokens = tokenize(src)
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def accept(self, text: str) -> bool:
        if self.current.kind == "op" and self.current.text == text:
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            raise ExpressionSyntaxError(
                f"Expected {text!r}, found {self._describe(self.current)}", self.current.offset)

    @staticmethod
    def _describe(token: Token) -> str:
        return "end of input" if token.kind == "eof" else repr(token.text)

    def combine(self, left: Expr, op: Token, right: Expr) -> Expr:
        try:
            return arith(left, op.text, right)
        except SymbolicZeroDivisionError:
            raise
        except ExpressionError as exc:
            raise ExpressionSyntaxError(str(exc), op.offset) from None

    def parse(self) -> Expr:
        result = self.expr()
        if self.current.kind != "eof":
            raise ExpressionSyntaxError(
                f"Unexpected token {self._describe(self.current)}", self.current.offset)
        return result

    def expr(self) -> Expr:
        left = self.term()
        while self.current.kind == "op" and self.current.text in "+-":
            op = self.advance()
            left = self.combine(left, op, self.term())
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.current.kind == "op" and self.current.text in "*/":
            op = self.advance()
            left = self.combine(left, op, self.unary())
        return left

    def unary(self) -> Expr:
        if self.accept("-"):
            return neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.current.kind == "op" and self.current.text == "^":
            op = self.advance()
            return self.combine(base, op, self.unary())
        return base

    def atom(self) -> Expr:
        token = self.current
        if token.kind == "number":
            self.advance()
            if any(c in token.text for c in ".eE"):
                return const(float(token.text))
            return const(Fraction(int(token.text)))
        if token.kind == "ident":
            self.advance()
            if self.current.kind == "op" and self.current.text == "(":
                kind = FUNCTIONS.get(token.text)
                if kind is None:
                    raise UnknownFunctionError(f"Unknown function {token.text!r}", token.offset)
                self.advance()
                arg = self.expr()
                self.expect(")")
                return unary(kind, arg)
            return sym(token.text)
        if self.accept("("):
            inner = self.expr()
            self.expect(")")
            return inner
        raise ExpressionSyntaxError(
            f"Unexpected token {self._describe(token)}", token.offset)


def parse(src: str) -> Expr:
    """
    Parse script text into a canonical expression.

    Args:
        src: Expression text such as ``-2*(x^2+y^2)+36``

    Returns:
        The canonical expression

    Raises:
        ExpressionSyntaxError: On malformed input, carrying the byte offset
        UnknownFunctionError: On a call to a function other than sin/cos/sqrt
        SymbolicZeroDivisionError: On division by the constant zero
    """
    return _Parser(src).parse()
