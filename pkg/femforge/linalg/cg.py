"""
Unpreconditioned conjugate gradients for symmetric positive definite systems.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..errors import SolverBreakdownError
from .matrices import Matrix, matvec


@dataclass
class CGResult:
    """
    Outcome of a CG run.

    ``residual`` is ||b - A x|| / ||b|| recomputed from the final iterate;
    ``history`` holds the recurrence estimates of every iteration.
    """
    x: np.ndarray
    iterations: int
    residual: float
    converged: bool
    history: List[float] = field(default_factory=list)


def cg_solve(a: Matrix, b: np.ndarray, tol: float = 1e-10,
             max_iter: Optional[int] = None, x0: Optional[np.ndarray] = None) -> CGResult:
    """
    Solve A x = b.

    Args:
        a: Dense or ELL matrix, assumed symmetric positive definite
        b: Right-hand side
        tol: Relative residual target ||b - A x|| <= tol ||b||
        max_iter: Iteration cap (default 10 N)
        x0: Initial guess (default zero)

    Returns:
        The iterate, iteration count, final relative residual, convergence
        flag and the recurrence estimate of the residual after every iteration

    Raises:
        SolverBreakdownError: If a non-finite value appears
    """
    b = np.asarray(b, dtype=np.float64)
    n = len(b)
    max_iter = 10 * n if max_iter is None else max_iter
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=np.float64)
    norm_b = float(np.linalg.norm(b))
    if norm_b == 0.0:
        return CGResult(np.zeros(n), 0, 0.0, True, [0.0])

    r = b - matvec(a, x)
    rr = float(r @ r)
    residual = float(np.sqrt(rr)) / norm_b
    history = [residual]
    iterations = 0
    while residual > tol and iterations < max_iter:
        # restart from b - A x whenever the recurrence reaches tol first
        p = r.copy()
        estimate = residual
        while estimate > tol and iterations < max_iter:
            ap = matvec(a, p)
            pap = float(p @ ap)
            if not np.isfinite(pap) or pap == 0.0:
                raise SolverBreakdownError(f"CG breakdown at iteration {iterations}: p.Ap = {pap}")
            alpha = rr / pap
            x += alpha * p
            r -= alpha * ap
            rr_new = float(r @ r)
            if not np.isfinite(rr_new):
                raise SolverBreakdownError(f"CG produced a non-finite residual at iteration {iterations}")
            p = r + (rr_new / rr) * p
            rr = rr_new
            iterations += 1
            estimate = float(np.sqrt(rr)) / norm_b
            history.append(estimate)
        r = b - matvec(a, x)
        rr = float(r @ r)
        residual = float(np.sqrt(rr)) / norm_b

    converged = residual <= tol
    if converged:
        logging.info(f"CG converged in {iterations} iterations (residual {residual:.3e})")
    else:
        logging.warning(f"CG stopped after {iterations} iterations (residual {residual:.3e} > {tol:.1e})")
    return CGResult(x, iterations, residual, converged, history)
