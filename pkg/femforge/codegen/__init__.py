"""
Runtime compilation of instantiated integrands.
"""
from .evaluators import (
    BILINEAR,
    LINEAR,
    CompiledEvaluator,
    IntegrandEvaluator,
    InterpretedEvaluator,
    create_evaluator,
)
from .lower import CompiledForm, compile_form, lower
from .program import (
    Instruction,
    KernelProgram,
    Opcode,
    disassemble,
    run,
    run_batch,
    validate_program,
)
from .template import KernelTemplate, emit_source

__all__ = [
    "BILINEAR",
    "LINEAR",
    "CompiledEvaluator",
    "CompiledForm",
    "Instruction",
    "IntegrandEvaluator",
    "InterpretedEvaluator",
    "KernelProgram",
    "KernelTemplate",
    "Opcode",
    "compile_form",
    "create_evaluator",
    "disassemble",
    "emit_source",
    "lower",
    "run",
    "run_batch",
    "validate_program",
]
