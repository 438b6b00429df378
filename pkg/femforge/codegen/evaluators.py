"""
Integrand evaluators used by the simulated device.

Two interchangeable strategies evaluate the same local-entry integrands:
the compiled one runs the lowered kernel programs, the interpreted one walks
the instantiated expression trees. They separate the benefit of runtime
compilation from the benefit of parallel execution.
"""
import logging
from abc import ABC, abstractmethod
from typing import Sequence

import numpy as np

from ..symbolic import KERNEL_ARGUMENTS, Expr, evaluate, evaluate_array
from .lower import CompiledForm
from .program import KernelProgram, run, run_batch

BILINEAR = "bilinear"
LINEAR = "linear"


class IntegrandEvaluator(ABC):
    """Abstract base class for integrand evaluators."""

    name = "abstract"

    def __init__(self, compiled: CompiledForm):
        self.compiled = compiled

    @property
    def n_local(self) -> int:
        return self.compiled.n_local

    @abstractmethod
    def evaluate(self, kind: str, entry: int, args: Sequence[float]) -> float:
        """
        Evaluate one integrand for one simulated thread.

        Args:
            kind: ``"bilinear"`` (entry = i * n_local + j) or ``"linear"`` (entry = i)
            entry: Flat entry index
            args: The 8 kernel arguments (xi, eta, x0, y0, x1, y1, x2, y2)

        Returns:
            The integrand value
        """
        pass

    @abstractmethod
    def evaluate_batch(self, kind: str, entry: int, args: np.ndarray) -> np.ndarray:
        """
        Evaluate one integrand for a lockstep group of simulated threads.

        Args:
            kind: ``"bilinear"`` or ``"linear"``
            entry: Flat entry index
            args: Array of shape (8, n), one column per thread

        Returns:
            Array of shape (n,)
        """
        pass


def _check_kind(kind: str) -> None:
    if kind not in (BILINEAR, LINEAR):
        raise ValueError(f"Unsupported integrand kind: {kind}")


class CompiledEvaluator(IntegrandEvaluator):
    """Runs the kernel programs produced by the runtime lowering."""

    name = "compiled"

    def program(self, kind: str, entry: int) -> KernelProgram:
        _check_kind(kind)
        if kind == BILINEAR:
            i, j = divmod(entry, self.n_local)
            return self.compiled.bilinear[i][j]
        return self.compiled.linear[entry]

    def evaluate(self, kind: str, entry: int, args: Sequence[float]) -> float:
        return run(self.program(kind, entry), args)

    def evaluate_batch(self, kind: str, entry: int, args: np.ndarray) -> np.ndarray:
        return run_batch(self.program(kind, entry), args)


class InterpretedEvaluator(IntegrandEvaluator):
    """Walks the instantiated expression trees."""

    name = "interpreted"

    def expression(self, kind: str, entry: int) -> Expr:
        _check_kind(kind)
        source = self.compiled.source
        if kind == BILINEAR:
            i, j = divmod(entry, self.n_local)
            return source.bilinear[i][j]
        return source.linear[entry]

    def evaluate(self, kind: str, entry: int, args: Sequence[float]) -> float:
        return evaluate(self.expression(kind, entry), dict(zip(KERNEL_ARGUMENTS, args)))

    def evaluate_batch(self, kind: str, entry: int, args: np.ndarray) -> np.ndarray:
        args = np.asarray(args, dtype=np.float64)
        return evaluate_array(self.expression(kind, entry), dict(zip(KERNEL_ARGUMENTS, args)))


def create_evaluator(kind: str, compiled: CompiledForm) -> IntegrandEvaluator:
    """
    Create an integrand evaluator by name.

    Args:
        kind: ``compiled`` or ``interpreted`` (case-insensitive)
        compiled: The compiled form whose entries are evaluated

    Returns:
        An instance of the matching evaluator

    Raises:
        ValueError: If the evaluator kind is not supported
    """
    kind = kind.lower()
    logging.info(f"Requested integrand evaluator: {kind}")
    if kind == "compiled":
        return CompiledEvaluator(compiled)
    elif kind == "interpreted":
        return InterpretedEvaluator(compiled)
    else:
        raise ValueError(f"Unsupported evaluator: {kind}")
