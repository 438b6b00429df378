"""
Lockstep execution of the atomic-add assembly.

All simulated threads of a run of consecutive blocks advance together, one
barrier phase at a time, on numpy arrays. Per element and entry the shared
accumulator receives the quadrature contributions in ascending point order
and the global scatter visits elements in ascending order, then local entries
in ascending order, which is the order the cooperative kernel produces in
deterministic mode.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

from ..codegen.evaluators import BILINEAR, LINEAR, IntegrandEvaluator
from ..errors import DegenerateElementError
from ..fem.reference import QuadratureRule
from .arrays import DeviceArrays
from .config import LaunchConfig
from .kernels import DEGENERATE_DET
from .runtime import DeviceBuffer

# scatter(rows, cols, values) adds local matrix entries to global storage
Scatter = Callable[[np.ndarray, np.ndarray, np.ndarray], None]


def _chunk_bounds(n_elements: int, cfg: LaunchConfig):
    per_block = cfg.elems_per_block
    size = max(per_block, (cfg.chunk_elements // per_block) * per_block)
    return [(start, min(start + size, n_elements)) for start in range(0, n_elements, size)]


def element_determinants(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    return (xs[:, 1] - xs[:, 0]) * (ys[:, 2] - ys[:, 0]) - (xs[:, 2] - xs[:, 0]) * (ys[:, 1] - ys[:, 0])


def run_lockstep(evaluator: IntegrandEvaluator, rule: QuadratureRule, d: DeviceArrays,
                 cfg: LaunchConfig, scatter: Scatter, b: DeviceBuffer) -> int:
    """
    Assemble every element of ``d`` into global storage.

    Args:
        evaluator: Integrand evaluator
        rule: Quadrature rule of the compiled form
        d: Flattened mesh
        cfg: Launch configuration (mode, workers, seed, block and chunk sizes)
        scatter: Global matrix scatter
        b: Global load vector

    Returns:
        The number of work items executed
    """
    n_local = evaluator.n_local
    n_entries = n_local * n_local
    points = [(float(p[0]), float(p[1])) for p in rule.points]
    weights = [float(w) for w in rule.weights]

    def process(bounds) -> None:
        start, stop = bounds
        m = stop - start
        xs = d.X[n_local * start:n_local * stop].reshape(m, n_local)
        ys = d.Y[n_local * start:n_local * stop].reshape(m, n_local)
        idx = d.gIdx[n_local * start:n_local * stop].reshape(m, n_local)

        det = element_determinants(xs, ys)
        bad = np.flatnonzero(np.abs(det) <= DEGENERATE_DET)
        if bad.size:
            raise DegenerateElementError(start + int(bad[0]), float(det[bad[0]]))

        local_a = np.zeros((m, n_entries))
        local_b = np.zeros((m, n_local))
        args = np.empty((2 + 2 * n_local, m))
        args[2::2] = xs.T
        args[3::2] = ys.T
        for (xi, eta), w in zip(points, weights):
            args[0] = xi
            args[1] = eta
            for entry in range(n_entries):
                local_a[:, entry] += evaluator.evaluate_batch(BILINEAR, entry, args) * w
            for entry in range(n_local):
                local_b[:, entry] += evaluator.evaluate_batch(LINEAR, entry, args) * w

        rows = np.repeat(idx, n_local, axis=1)
        cols = np.tile(idx, (1, n_local))
        scatter(rows.ravel(), cols.ravel(), local_a.ravel())
        b.atomic_add_at(idx.ravel(), local_b.ravel())

    chunks = _chunk_bounds(d.n_elements, cfg)
    if cfg.mode == "deterministic":
        for bounds in chunks:
            process(bounds)
    else:
        order = np.random.default_rng(cfg.seed).permutation(len(chunks))
        logging.debug(f"Lockstep: {len(chunks)} work items on {cfg.workers} workers")
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [pool.submit(process, chunks[i]) for i in order]
            for future in futures:
                future.result()
    return len(chunks)
