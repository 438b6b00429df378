"""
Exception hierarchy shared by all femforge modules.

Every error derives from the builtin a caller would naturally catch
(ValueError for bad input, RuntimeError for failures during a simulated
launch), so ``except ValueError`` keeps working for callers that do not
care about the precise type.
"""
from typing import Optional


class ExpressionError(ValueError):
    """Base class for problems with symbolic expressions."""


class InvalidSymbolError(ExpressionError):
    """A symbol name does not match the identifier grammar."""


class UnboundSymbolError(ExpressionError):
    """An expression references a symbol that has no value or slot."""

    def __init__(self, name: str):
        super().__init__(f"Unbound symbol: {name}")
        self.name = name


class SymbolicZeroDivisionError(ExpressionError, ZeroDivisionError):
    """Division by (or negative power of) the constant zero."""


class ExpressionSyntaxError(ExpressionError):
    """Expression text does not conform to the grammar."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownFunctionError(ExpressionSyntaxError):
    """A call names a function outside sin, cos and sqrt."""


class MeshError(ValueError):
    """A mesh violates its structural invariants."""


class MeshFormatError(MeshError):
    """A mesh file could not be read."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class WeakFormError(ValueError):
    """A weak form references symbols outside its reserved set."""


class KernelError(ValueError):
    """Base class for kernel lowering and execution errors."""


class KernelArityError(KernelError):
    """A kernel program was run with the wrong number of arguments."""


class UnsupportedNodeError(KernelError):
    """The lowering met an expression node it cannot translate."""


class TemplateError(KernelError):
    """A kernel template is malformed or a placeholder value is missing."""


class DeviceError(RuntimeError):
    """Base class for failures inside a simulated launch."""


class DegenerateElementError(DeviceError):
    """An element has a (numerically) vanishing Jacobian determinant."""

    def __init__(self, element: int, det: Optional[float] = None):
        detail = "" if det is None else f" (|det J| = {abs(det):.3e})"
        super().__init__(f"Degenerate element {element}{detail}")
        self.element = element


class SparsityMismatchError(DeviceError):
    """A scatter target is missing from the sparsity pattern."""


class BarrierDeadlockError(DeviceError):
    """A thread exited while other threads of its block wait at a barrier."""


class SolverBreakdownError(ArithmeticError):
    """The iterative solver produced a non-finite value."""


class DenseMemoryError(ValueError):
    """A dense matrix would exceed the configured memory cap."""
