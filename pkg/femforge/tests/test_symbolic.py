"""
Tests for expression construction, calculus and evaluation.
"""
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np
import pytest

# Add the project root directory to the Python path if not already added
project_root = os.path.abspath(os.path.join(os.path.dirname(__file__), '../..'))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from femforge.errors import (
    ExpressionError,
    InvalidSymbolError,
    SymbolicZeroDivisionError,
    UnboundSymbolError,
)
from femforge.symbolic import (
    SymbolTable,
    arith,
    canonicalize,
    const,
    cos,
    diff,
    evaluate,
    evaluate_array,
    expand,
    free_symbols,
    parse,
    sin,
    sqrt,
    substitute,
    sym,
    to_string,
)
from femforge.symbolic.expr import compare_nodes

x = sym("x")
y = sym("y")


def sample_corpus():
    return [
        -2 * (x ** 2 + y ** 2) + 36,
        sin(x * y) + x ** 3 * y - cos(x) / (2 + y ** 2),
        sqrt(1 + x ** 2) * (x - y) ** 5,
        x / y - Fraction(1, 3) * y ** -2,
        0.1 * x + 2.5e-3 * sin(y) - 7,
        (x + 1) ** 6 / (y ** 2 + 4),
    ]


def test_sym_returns_shared_handle():
    """Test that the same name always yields the same node."""
    # Arrange & Act
    first = sym("x")
    second = sym("x")

    # Assert
    assert first is second
    assert first.is_symbol
    assert first.name == "x"


def test_sym_rejects_invalid_identifier():
    """Test that names outside the identifier grammar are rejected."""
    with pytest.raises(InvalidSymbolError):
        sym("2x")
    with pytest.raises(InvalidSymbolError):
        sym("")


def test_arith_canonical_rules():
    """Test constant folding and the identity rules."""
    # Arrange & Act & Assert
    assert arith(x, "*", 0) is const(0)
    assert arith(2, "+", 3) is const(5)
    assert x + 0 is x
    assert x * 1 is x
    assert x ** 1 is x
    assert x ** 0 is const(1)
    assert x + y is y + x
    assert x - x is const(0)
    assert x * x is x ** 2


def test_arith_rejects_unknown_operator_and_fractional_exponent():
    """Test that only + - * / ^ with integer exponents are accepted."""
    with pytest.raises(ExpressionError):
        arith(x, "%", y)
    with pytest.raises(ExpressionError):
        arith(x, "^", 0.5)
    with pytest.raises(ExpressionError):
        arith(x, "^", y)


def test_division_by_constant_zero_raises():
    """Test that dividing by the constant zero is an error."""
    with pytest.raises(SymbolicZeroDivisionError):
        arith(x, "/", 0)
    with pytest.raises(ZeroDivisionError):
        x / (y - y)


def test_exact_rationals_until_mixed_with_floats():
    """Test that integer arithmetic stays exact and floats degrade it."""
    # Arrange & Act
    exact = const(1) / 3 + const(1) / 6
    mixed = const(1) / 3 + 0.5

    # Assert
    assert exact.value == Fraction(1, 2)
    assert isinstance(mixed.value, float)


def test_expand_binomial():
    """Test (x + y)^2 expands term by term."""
    # Act
    expanded = expand((x + y) ** 2)

    # Assert
    assert expanded is x ** 2 + 2 * x * y + y ** 2


def test_diff_power_and_chain_rules():
    """Test the power rule and the chain rule through sin."""
    # Act & Assert
    assert diff(x ** 2 + y, x) is 2 * x
    assert diff(sin(x * y), x) is y * cos(x * y)
    assert diff(x * y, "z") is const(0)
    assert diff(sqrt(x), x) is Fraction(1, 2) / sqrt(x)


def test_diff_matches_central_differences():
    """Test derivatives against finite differences at random points."""
    # Arrange
    rng = np.random.default_rng(7)
    h = 1e-5
    corpus = sample_corpus()[:3]

    for e in corpus:
        for s in ("x", "y"):
            derivative = diff(e, s)
            for _ in range(50):
                point = {"x": float(rng.uniform(-1, 1)), "y": float(rng.uniform(-1, 1))}
                plus = dict(point)
                minus = dict(point)
                plus[s] += h
                minus[s] -= h

                # Act
                exact = evaluate(derivative, point)
                approx = (evaluate(e, plus) - evaluate(e, minus)) / (2 * h)

                # Assert
                assert abs(exact - approx) <= 1e-6 * max(1.0, abs(exact))


def test_substitute_examples():
    """Test simultaneous substitution."""
    # Act & Assert
    assert substitute(x + y, {x: y}) is 2 * y
    assert substitute(x, {}) is x
    assert substitute(x * y, {x: y, y: x}) is x * y
    assert substitute(x - y, {"x": y, "y": x}) is y - x
    assert substitute(x ** 2 + y, {x: x}) is x ** 2 + y


def test_evaluate_examples():
    """Test IEEE evaluation."""
    # Arrange
    f = -2 * (x ** 2 + y ** 2) + 36

    # Act & Assert
    assert evaluate(f, {"x": 0, "y": 0}) == 36.0
    assert evaluate(x / y, {"x": 1.0, "y": 0.0}) == math.inf
    assert math.isnan(evaluate(x / y, {"x": 0.0, "y": 0.0}))
    assert evaluate(sin(x), {x: 0.0}) == 0.0


def test_evaluate_reports_unbound_symbol():
    """Test that a missing value names the symbol."""
    # Act
    with pytest.raises(UnboundSymbolError) as excinfo:
        evaluate(x + y, {"x": 1.0})

    # Assert
    assert excinfo.value.name == "y"
    assert "Unbound symbol: y" in str(excinfo.value)


def test_evaluate_array_broadcasts():
    """Test that array evaluation matches scalar evaluation elementwise."""
    # Arrange
    xs = np.linspace(-1.0, 1.0, 7)

    for e in (sample_corpus()[0], sample_corpus()[3]):
        # Act
        values = evaluate_array(e, {"x": xs, "y": 0.5})

        # Assert
        assert values.shape == (7,)
        for xv, value in zip(xs, values):
            assert value == evaluate(e, {"x": float(xv), "y": 0.5})


def test_free_symbols_examples():
    """Test free symbol sets."""
    assert free_symbols(x * y + 1) == {"x", "y"}
    assert free_symbols(const(5)) == frozenset()
    assert free_symbols(substitute(x, {x: y})) == {"y"}


def test_canonicalize_is_idempotent():
    """Test that rebuilding a canonical expression changes nothing."""
    for e in sample_corpus():
        assert canonicalize(e) is e
        assert canonicalize(canonicalize(e)) is canonicalize(e)


def test_print_parse_round_trip_is_exact():
    """Test that printed expressions parse back to the same values."""
    # Arrange
    rng = np.random.default_rng(3)

    for e in sample_corpus():
        # Act
        reparsed = parse(to_string(e))

        # Assert
        for _ in range(10):
            point = {"x": float(rng.uniform(0.1, 2)), "y": float(rng.uniform(0.1, 2))}
            assert evaluate(reparsed, point) == evaluate(e, point)


def test_to_string_is_fully_parenthesized():
    """Test the printed form of a small expression."""
    assert to_string(2 * x + sin(y)) == "((2 * x) + sin(y))"
    assert to_string(x / y) == "(x / y)"
    assert to_string(const(Fraction(-1, 3))) == "((-1) / 3)"


def test_concurrent_construction_shares_nodes():
    """Test that building the same expression on many threads yields one node."""
    # Arrange
    def build(_):
        return -2 * (sym("x") ** 2 + sym("y") ** 2) + 36

    # Act
    with ThreadPoolExecutor(max_workers=8) as pool:
        results = list(pool.map(build, range(64)))

    # Assert
    assert all(r is results[0] for r in results)


def nested_sines(base, depth):
    node = base
    for _ in range(depth):
        node = sin(node)
    return node


def test_deep_expressions_sort_and_intern():
    """Test ordering and sharing of expressions nested thousands of levels deep."""
    # Arrange
    deep_x = nested_sines(x, 3000)
    deep_y = nested_sines(y, 3000)

    # Act
    total = deep_x + deep_y

    # Assert
    assert total is deep_y + deep_x
    assert total.args == (deep_x, deep_y)
    assert nested_sines(x, 3000) is deep_x
    assert compare_nodes(deep_x, deep_y) == -1
    assert compare_nodes(deep_y, deep_x) == 1
    assert compare_nodes(deep_x, nested_sines(x, 3000)) == 0


def test_structural_order_of_powers_and_products():
    """Test that bases order before exponents and kinds order by rank."""
    assert compare_nodes(x ** 2, x ** 3) == -1
    assert compare_nodes(x ** 3, y ** 2) == -1
    assert compare_nodes(x ** 2, x * y) == -1
    assert compare_nodes(const(2), x) == -1


def test_symbol_table_slots():
    """Test dense slot numbering and error reporting."""
    # Arrange
    table = SymbolTable.kernel_arguments()

    # Act & Assert
    assert len(table) == 8
    assert table.slot("xi") == 0
    assert table.slot("y2") == 7
    assert "x1" in table
    with pytest.raises(UnboundSymbolError):
        table.slot("z")
    with pytest.raises(ValueError):
        SymbolTable(["a", "a"])
