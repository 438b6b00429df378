"""
Minimal computer-algebra engine for weak-form instantiation.
"""
from .calculus import diff, expand, free_symbols, substitute
from .evaluate import evaluate, evaluate_array, split_product
from .expr import (
    Expr,
    Kind,
    add,
    arith,
    as_expr,
    canonicalize,
    const,
    cos,
    div,
    mul,
    neg,
    power,
    sin,
    sqrt,
    sub,
    sym,
)
from .parser import parse
from .printer import to_string
from .table import KERNEL_ARGUMENTS, SymbolTable

__all__ = [
    "Expr",
    "Kind",
    "KERNEL_ARGUMENTS",
    "SymbolTable",
    "add",
    "arith",
    "as_expr",
    "canonicalize",
    "const",
    "cos",
    "diff",
    "div",
    "evaluate",
    "evaluate_array",
    "expand",
    "free_symbols",
    "mul",
    "neg",
    "parse",
    "power",
    "sin",
    "split_product",
    "sqrt",
    "sub",
    "substitute",
    "sym",
    "to_string",
]
