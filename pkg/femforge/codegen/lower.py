"""
Runtime lowering of canonical expressions to kernel programs.

The emitted operation sequence mirrors the tree evaluator: sums are folded
left to right, products multiply the coefficient and the numerator factors
left to right and divide once by the denominator product, and integer powers
up to ``UNROLL_LIMIT`` become multiplication chains.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from ..errors import UnsupportedNodeError
from ..fem.reference import QuadratureRule, quadrature_rule
from ..fem.weakform import InstantiatedForm
from ..symbolic import Expr, Kind, SymbolTable, neg, split_product
from ..symbolic.expr import split_coefficient
from ..symbolic.numeric import UNROLL_LIMIT
from .program import Instruction, KernelProgram, Opcode, apply_scalar, disassemble

_UNARY = {Kind.SIN: Opcode.SIN, Kind.COS: Opcode.COS, Kind.SQRT: Opcode.SQRT}


class _Builder:
    """Accumulates instructions with constant folding and structural CSE."""

    def __init__(self, args: SymbolTable):
        self.args = args
        self.instructions: List[Instruction] = []
        self.constants: List[float] = []
        self._pool: Dict[str, int] = {}
        self._cse: Dict[tuple, int] = {}
        self._const_of: Dict[int, float] = {}
        self._memo: Dict[Expr, int] = {}

    def emit(self, op: Opcode, operands: Tuple[int, ...] = (), imm: Optional[int] = None) -> int:
        if operands and all(r in self._const_of for r in operands):
            values = [self._const_of[r] for r in operands]
            return self.constant(apply_scalar(op, *values, imm=imm))
        key = (op, operands, imm)
        reg = self._cse.get(key)
        if reg is None:
            reg = len(self.instructions)
            self.instructions.append(Instruction(op, operands, imm))
            self._cse[key] = reg
        return reg

    def constant(self, value: float) -> int:
        value = float(value)
        index = self._pool.get(value.hex())
        if index is None:
            index = len(self.constants)
            self.constants.append(value)
            self._pool[value.hex()] = index
        reg = self.emit(Opcode.LOAD_CONST, (), index)
        self._const_of[reg] = value
        return reg

    def chain(self, base: int, n: int) -> int:
        if n > UNROLL_LIMIT:
            return self.emit(Opcode.POW_INT, (base,), n)
        acc = base
        for _ in range(n - 1):
            acc = self.emit(Opcode.MUL, (acc, base))
        return acc

    def product(self, registers: Sequence[int]) -> Optional[int]:
        if not registers:
            return None
        acc = registers[0]
        for reg in registers[1:]:
            acc = self.emit(Opcode.MUL, (acc, reg))
        return acc

    def lower(self, node: Expr) -> int:
        reg = self._memo.get(node)
        if reg is None:
            reg = self._lower(node)
            self._memo[node] = reg
        return reg

    def _lower(self, node: Expr) -> int:
        kind = node.kind
        if kind is Kind.CONST:
            return self.constant(node.value)
        if kind is Kind.SYMBOL:
            return self.emit(Opcode.LOAD_ARG, (), self.args.slot(node.name))
        if kind is Kind.ADD:
            acc = self.lower(node.args[0])
            for term in node.args[1:]:
                coeff, _ = split_coefficient(term)
                if coeff == -1:
                    acc = self.emit(Opcode.SUB, (acc, self.lower(neg(term))))
                else:
                    acc = self.emit(Opcode.ADD, (acc, self.lower(term)))
            return acc
        if kind is Kind.MUL:
            return self._lower_product(node)
        if kind is Kind.POW:
            base = self.lower(node.args[0])
            if node.exponent > 0:
                return self.chain(base, node.exponent)
            return self.emit(Opcode.DIV, (self.constant(1.0), self.chain(base, -node.exponent)))
        if kind in _UNARY:
            return self.emit(_UNARY[kind], (self.lower(node.args[0]),))
        raise UnsupportedNodeError(f"Cannot lower node kind {kind}")

    def _lower_product(self, node: Expr) -> int:
        parts = split_product(node)
        factors = [self.chain(self.lower(b), n) for b, n in parts.numerator]
        coeff = None if parts.coefficient is None else parts.coefficient.value
        if coeff is None:
            numer = self.product(factors)
        elif coeff == -1 and factors:
            numer = self.emit(Opcode.NEG, (self.product(factors),))
        elif coeff == 2 and factors:
            rest = self.product(factors)
            numer = self.emit(Opcode.ADD, (rest, rest))
        else:
            numer = self.product([self.constant(coeff)] + factors)
        if not parts.denominator:
            return numer
        if numer is None:
            numer = self.constant(1.0)
        den = self.product([self.chain(self.lower(b), n) for b, n in parts.denominator])
        return self.emit(Opcode.DIV, (numer, den))

    def finish(self, result: int) -> KernelProgram:
        # drop instructions made dead by folding, renumbering registers and pool
        live = {result}
        for index in range(result, -1, -1):
            if index in live:
                live.update(self.instructions[index].operands)
        registers: Dict[int, int] = {}
        pool: Dict[int, int] = {}
        instructions, constants = [], []
        for index in sorted(live):
            op, operands, imm = self.instructions[index]
            if op is Opcode.LOAD_CONST:
                if imm not in pool:
                    pool[imm] = len(constants)
                    constants.append(self.constants[imm])
                imm = pool[imm]
            registers[index] = len(instructions)
            instructions.append(Instruction(op, tuple(registers[r] for r in operands), imm))
        return KernelProgram(tuple(instructions), tuple(constants),
                             len(self.args), registers[result], self.args.names)


def lower(e: Expr, args: Optional[SymbolTable] = None) -> KernelProgram:
    """
    Compile an expression into an SSA kernel program.

    Args:
        e: Canonical expression
        args: Argument slots; defaults to the integrand kernel arguments

    Returns:
        A program with constants folded and common subexpressions shared

    Raises:
        UnboundSymbolError: If ``e`` has a symbol without a slot
    """
    builder = _Builder(args or SymbolTable.kernel_arguments())
    return builder.finish(builder.lower(e))


@dataclass(frozen=True, eq=False)
class CompiledForm:
    """Kernel programs of every local matrix and vector entry plus launch metadata."""
    bilinear: Tuple[Tuple[KernelProgram, ...], ...]
    linear: Tuple[KernelProgram, ...]
    rule: QuadratureRule
    source: InstantiatedForm

    def __post_init__(self):
        n = len(self.linear)
        if len(self.bilinear) != n or any(len(row) != n for row in self.bilinear):
            raise ValueError(f"Expected {n * n} bilinear programs for {n} linear programs")

    @property
    def n_local(self) -> int:
        return len(self.linear)

    @property
    def n_quad(self) -> int:
        return self.rule.n_points

    def programs(self) -> Tuple[Tuple[str, KernelProgram], ...]:
        """(name, program) pairs: ``bilinear[i][j]`` row-major, then ``linear[i]``."""
        named = [(f"bilinear[{i}][{j}]", p) for i, row in enumerate(self.bilinear)
                 for j, p in enumerate(row)]
        named += [(f"linear[{i}]", p) for i, p in enumerate(self.linear)]
        return tuple(named)

    def disassembly(self) -> str:
        """Listing of every program under a ``# name`` header, blank-line separated."""
        return "\n".join(f"# {name}\n{disassemble(program)}\n" for name, program in self.programs())


def compile_form(f: InstantiatedForm, rule: Optional[QuadratureRule] = None) -> CompiledForm:
    """Lower every entry of an instantiated form."""
    args = SymbolTable.kernel_arguments()
    bilinear = tuple(tuple(lower(e, args) for e in row) for row in f.bilinear)
    linear = tuple(lower(e, args) for e in f.linear)
    compiled = CompiledForm(bilinear, linear, rule or quadrature_rule(2), f)
    sizes = [len(p) for _, p in compiled.programs()]
    logging.info(f"Compiled {len(sizes)} kernel programs ({sum(sizes)} instructions in total)")
    return compiled
