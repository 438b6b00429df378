"""
Command-line driver.
"""
from .commands import (
    cmd_assemble,
    cmd_bench,
    cmd_codegen,
    cmd_mesh,
    cmd_solve,
    main,
)
from .models import PRESETS, ProblemConfig

__all__ = [
    "PRESETS",
    "ProblemConfig",
    "cmd_assemble",
    "cmd_bench",
    "cmd_codegen",
    "cmd_mesh",
    "cmd_solve",
    "main",
]
