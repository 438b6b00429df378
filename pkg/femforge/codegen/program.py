"""
Register-based kernel programs and their interpreter.

A program is a flat list of instructions in static single assignment form:
instruction ``k`` writes register ``k`` and reads only registers ``< k``.
"""
from dataclasses import dataclass
from enum import Enum
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ..errors import KernelArityError, KernelError
from ..symbolic.numeric import ieee_cos, ieee_div, ieee_sin, ieee_sqrt, ipow


class Opcode(str, Enum):
    LOAD_ARG = "load-arg"
    LOAD_CONST = "load-const"
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    DIV = "div"
    NEG = "neg"
    POW_INT = "pow-int"
    SIN = "sin"
    COS = "cos"
    SQRT = "sqrt"


ARITY = {
    Opcode.LOAD_ARG: 0,
    Opcode.LOAD_CONST: 0,
    Opcode.ADD: 2,
    Opcode.SUB: 2,
    Opcode.MUL: 2,
    Opcode.DIV: 2,
    Opcode.NEG: 1,
    Opcode.POW_INT: 1,
    Opcode.SIN: 1,
    Opcode.COS: 1,
    Opcode.SQRT: 1,
}


class Instruction(NamedTuple):
    """One SSA instruction; ``imm`` is the arg slot, pool index or exponent."""
    op: Opcode
    operands: Tuple[int, ...] = ()
    imm: Optional[int] = None


@dataclass(frozen=True)
class KernelProgram:
    instructions: Tuple[Instruction, ...]
    constants: Tuple[float, ...]
    arity: int
    result: int
    arg_names: Tuple[str, ...]

    def __len__(self) -> int:
        return len(self.instructions)

    @property
    def is_constant(self) -> bool:
        return len(self.instructions) == 1 and self.instructions[0].op is Opcode.LOAD_CONST


def apply_scalar(op: Opcode, a: float = 0.0, b: float = 0.0, imm: Optional[int] = None) -> float:
    """Execute one arithmetic opcode on Python floats."""
    if op is Opcode.ADD:
        return a + b
    if op is Opcode.SUB:
        return a - b
    if op is Opcode.MUL:
        return a * b
    if op is Opcode.DIV:
        return ieee_div(a, b)
    if op is Opcode.NEG:
        return -a
    if op is Opcode.POW_INT:
        return ipow(a, imm)
    if op is Opcode.SIN:
        return ieee_sin(a)
    if op is Opcode.COS:
        return ieee_cos(a)
    if op is Opcode.SQRT:
        return ieee_sqrt(a)
    raise KernelError(f"Not an arithmetic opcode: {op}")


def run(k: KernelProgram, args: Sequence[float]) -> float:
    """
    Execute ``k`` on one argument vector.

    Args:
        k: The program
        args: One float per argument slot

    Returns:
        The value of the result register

    Raises:
        KernelArityError: If ``len(args) != k.arity``
    """
    if len(args) != k.arity:
        raise KernelArityError(f"Program expects {k.arity} arguments, got {len(args)}")
    regs: List[float] = []
    push = regs.append
    constants = k.constants
    for op, operands, imm in k.instructions:
        if op is Opcode.LOAD_ARG:
            push(float(args[imm]))
        elif op is Opcode.LOAD_CONST:
            push(constants[imm])
        elif len(operands) == 2:
            push(apply_scalar(op, regs[operands[0]], regs[operands[1]]))
        else:
            push(apply_scalar(op, regs[operands[0]], imm=imm))
    return regs[k.result]


_ARRAY_OPS = {
    Opcode.ADD: np.add,
    Opcode.SUB: np.subtract,
    Opcode.MUL: np.multiply,
    Opcode.DIV: np.divide,
    Opcode.NEG: np.negative,
    Opcode.SIN: np.sin,
    Opcode.COS: np.cos,
    Opcode.SQRT: np.sqrt,
}


def run_batch(k: KernelProgram, columns: np.ndarray) -> np.ndarray:
    """
    Execute ``k`` over many argument vectors at once.

    Args:
        k: The program
        columns: Array of shape (arity, n); column ``t`` is one argument vector

    Returns:
        Array of shape (n,)
    """
    columns = np.asarray(columns, dtype=np.float64)
    if columns.ndim != 2 or columns.shape[0] != k.arity:
        raise KernelArityError(f"Program expects {k.arity} argument rows, got shape {columns.shape}")
    regs = []
    push = regs.append
    with np.errstate(all="ignore"):
        for op, operands, imm in k.instructions:
            if op is Opcode.LOAD_ARG:
                push(columns[imm])
            elif op is Opcode.LOAD_CONST:
                push(np.float64(k.constants[imm]))
            elif op is Opcode.POW_INT:
                push(ipow(np.asarray(regs[operands[0]]), imm))
            else:
                push(_ARRAY_OPS[op](*(regs[r] for r in operands)))
    return np.array(np.broadcast_to(regs[k.result], columns.shape[1:]), dtype=np.float64)


def validate_program(k: KernelProgram) -> None:
    """
    Check SSA form and absence of duplicate pure instructions.

    Raises:
        KernelError: Describing the first violation found
    """
    seen = {}
    for index, ins in enumerate(k.instructions):
        if len(ins.operands) != ARITY[ins.op]:
            raise KernelError(f"r{index}: {ins.op.value} takes {ARITY[ins.op]} operands")
        for r in ins.operands:
            if not 0 <= r < index:
                raise KernelError(f"r{index} reads r{r} before it is written")
        if ins.op is Opcode.LOAD_ARG and not 0 <= ins.imm < k.arity:
            raise KernelError(f"r{index} loads argument slot {ins.imm} of {k.arity}")
        if ins.op is Opcode.LOAD_CONST and not 0 <= ins.imm < len(k.constants):
            raise KernelError(f"r{index} loads constant {ins.imm} of {len(k.constants)}")
        key = (ins.op, ins.operands, ins.imm)
        if key in seen:
            raise KernelError(f"r{index} duplicates r{seen[key]}")
        seen[key] = index
    if not 0 <= k.result < len(k.instructions):
        raise KernelError(f"Result register r{k.result} does not exist")


def disassemble(k: KernelProgram) -> str:
    """Render one instruction per line, e.g. ``r3 = mul r1 r2``."""
    lines = []
    for index, ins in enumerate(k.instructions):
        if ins.op is Opcode.LOAD_ARG:
            operand = k.arg_names[ins.imm]
        elif ins.op is Opcode.LOAD_CONST:
            operand = repr(k.constants[ins.imm])
        else:
            operand = " ".join(f"r{r}" for r in ins.operands)
            if ins.op is Opcode.POW_INT:
                operand += f" {ins.imm}"
        lines.append(f"r{index} = {ins.op.value} {operand}")
    lines.append(f"ret r{k.result}")
    return "\n".join(lines)
