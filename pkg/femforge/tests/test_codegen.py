"""
Tests for lowering expressions to kernel programs.
"""
import math
import os
import sys
from pathlib import Path

import numpy as np
import pytest

# Add the project root directory to the Python path if not already added
project_root = os.path.abspath(os.path.join(os.path.dirname(__file__), '../..'))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from femforge.codegen import (
    Instruction,
    KernelProgram,
    Opcode,
    compile_form,
    disassemble,
    lower,
    run,
    run_batch,
    validate_program,
)
from femforge.errors import KernelArityError, KernelError, UnboundSymbolError
from femforge.fem import ETA, XI, PdeProblem, affine_map, instantiate
from femforge.symbolic import KERNEL_ARGUMENTS, evaluate, evaluate_array, parse, sin, sqrt, sym

DATA_DIR = Path(__file__).parent / "data"


def random_arguments(rng, count):
    """Argument vectors of well-shaped elements (|det J| >= 1e-2)."""
    rows = []
    while len(rows) < count:
        xi, eta = rng.uniform(0.0, 1.0, 2)
        corners = rng.uniform(-1.0, 1.0, 6)
        x0, y0, x1, y1, x2, y2 = corners
        if abs((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)) >= 1e-2:
            rows.append([xi, eta, *corners])
    return np.array(rows)


def test_closed_expression_folds_to_one_constant():
    """Test that a closed expression lowers to a single constant load."""
    # Act
    program = lower(parse("2*3 + sqrt(16) - 1/4"))

    # Assert
    assert program.is_constant
    assert len(program) == 1
    assert program.constants == (9.75,)
    assert run(program, [0.0] * 8) == 9.75


def test_common_subexpressions_are_shared():
    """Test that a repeated subtree is computed once."""
    # Arrange
    s = sin(XI * ETA)

    # Act
    program = lower(s ** 2 + s + sqrt(s))

    # Assert
    validate_program(program)
    ops = [ins.op for ins in program.instructions]
    assert ops.count(Opcode.SIN) == 1
    assert ops.count(Opcode.LOAD_ARG) == 2


def test_small_powers_unroll_and_large_powers_use_pow_int():
    """Test the integer power strategy."""
    # Act
    cube = lower(XI ** 3)
    sixth = lower(XI ** 6)

    # Assert
    assert [ins.op for ins in cube.instructions] == [Opcode.LOAD_ARG, Opcode.MUL, Opcode.MUL]
    assert sixth.instructions[-1] == Instruction(Opcode.POW_INT, (0,), 6)
    assert run(sixth, [2.0] + [0.0] * 7) == 64.0


def test_quotient_is_one_division():
    """Test that x / y lowers to a single IEEE division."""
    # Act
    program = lower(XI / ETA)

    # Assert
    assert [ins.op for ins in program.instructions].count(Opcode.DIV) == 1
    assert run(program, [1.0, 0.0] + [0.0] * 6) == math.inf


def test_disassemble_format():
    """Test the one-instruction-per-line listing."""
    # Act
    text = disassemble(lower(XI * ETA))

    # Assert
    lines = text.splitlines()
    assert "r0 = load-arg eta" in lines
    assert "r1 = load-arg xi" in lines
    assert "r2 = mul r0 r1" in lines
    assert lines[-1] == "ret r2"


def test_lower_rejects_symbols_without_slot():
    """Test that every symbol needs an argument slot."""
    with pytest.raises(UnboundSymbolError):
        lower(sym("z") + XI)


def test_run_checks_arity():
    """Test the argument count check of both runners."""
    # Arrange
    program = lower(XI + ETA)

    # Act & Assert
    with pytest.raises(KernelArityError):
        run(program, [1.0, 2.0])
    with pytest.raises(KernelArityError):
        run_batch(program, np.zeros((2, 5)))


def test_validate_program_detects_violations():
    """Test the SSA and duplicate checks."""
    # Arrange
    forward = KernelProgram(
        (Instruction(Opcode.LOAD_ARG, (), 0), Instruction(Opcode.ADD, (0, 2))),
        (), 8, 1, KERNEL_ARGUMENTS)
    duplicate = KernelProgram(
        (Instruction(Opcode.LOAD_ARG, (), 0), Instruction(Opcode.LOAD_ARG, (), 0)),
        (), 8, 1, KERNEL_ARGUMENTS)

    # Act & Assert
    with pytest.raises(KernelError, match="before it is written"):
        validate_program(forward)
    with pytest.raises(KernelError, match="duplicates"):
        validate_program(duplicate)


def test_compiled_form_has_twelve_valid_programs(demo_compiled):
    """Test the program set of the demo problem."""
    # Act
    named = demo_compiled.programs()

    # Assert
    assert len(named) == 12
    assert [name for name, _ in named][:2] == ["bilinear[0][0]", "bilinear[0][1]"]
    assert named[-1][0] == "linear[2]"
    for _, program in named:
        validate_program(program)
        assert program.arg_names == KERNEL_ARGUMENTS


def test_compiled_programs_match_tree_evaluation(demo_compiled):
    """Test every demo program against tree evaluation on random arguments."""
    # Arrange
    rng = np.random.default_rng(2024)
    args = random_arguments(rng, 1000)
    source = demo_compiled.source
    expressions = [e for row in source.bilinear for e in row] + list(source.linear)
    programs = [p for _, p in demo_compiled.programs()]

    for program, expression in zip(programs, expressions):
        # Act
        batch = run_batch(program, args.T)
        expected = evaluate_array(expression, dict(zip(KERNEL_ARGUMENTS, args.T)))

        # Assert
        np.testing.assert_allclose(batch, expected, rtol=1e-12, atol=1e-12)
        for t in range(0, 1000, 20):
            scalar = evaluate(expression, dict(zip(KERNEL_ARGUMENTS, args[t])))
            assert abs(run(program, args[t]) - scalar) <= 1e-12 * max(1.0, abs(scalar))


def test_jacobian_determinant_of_unit_triangle():
    """Test the lowered det J on the reference triangle."""
    # Arrange
    program = lower(affine_map().det)

    # Act
    value = run(program, [0.3, 0.2, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0])

    # Assert
    assert value == 1.0


def test_disassembly_matches_snapshot(two_node_compiled):
    """Test the lowered programs of a small form byte for byte."""
    # Act
    listing = two_node_compiled.disassembly()

    # Assert
    assert listing.encode("utf-8") == (DATA_DIR / "two_node_form.ir").read_bytes()
    for _, program in two_node_compiled.programs():
        validate_program(program)


def test_linear_programs_fold_to_zero_without_source():
    """Test that lambda = 0 and f = 0 leave constant-zero load programs."""
    # Arrange
    problem = PdeProblem.from_strings(["1", "0", "0", "1"], "0", "0")

    # Act
    compiled = compile_form(instantiate(problem.weak_form()))

    # Assert
    for program in compiled.linear:
        assert program.is_constant
        assert program.constants == (0.0,)
        assert run(program, [0.25, 0.5, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0]) == 0.0


def test_symmetric_sigma_gives_symmetric_programs():
    """Test that entries (i, j) and (j, i) agree for a symmetric coefficient."""
    # Arrange
    problem = PdeProblem.from_strings(["1 + x^2", "x*y", "x*y", "2 + y"], "1", "1")
    compiled = compile_form(instantiate(problem.weak_form()))
    args = random_arguments(np.random.default_rng(11), 200)

    for i in range(3):
        for j in range(i + 1, 3):
            # Act
            upper = run_batch(compiled.bilinear[i][j], args.T)
            transposed = run_batch(compiled.bilinear[j][i], args.T)

            # Assert
            scale = max(1.0, float(np.max(np.abs(upper))))
            np.testing.assert_allclose(upper, transposed, rtol=1e-10, atol=1e-10 * scale)
