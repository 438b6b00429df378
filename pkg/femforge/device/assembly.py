"""
Global assembly on the simulated device and the sequential reference.
"""
import logging
import time
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ..codegen.evaluators import IntegrandEvaluator, create_evaluator
from ..codegen.lower import CompiledForm
from ..errors import DegenerateElementError, SparsityMismatchError
from ..fem.mesh import Mesh
from ..fem.reference import QuadratureRule, quadrature_rule
from ..fem.weakform import InstantiatedForm, WeakForm, instantiate
from ..linalg.matrices import DenseMatrix, EllMatrix
from ..symbolic import KERNEL_ARGUMENTS, evaluate_array
from .arrays import DeviceArrays
from .config import LaunchConfig
from .kernels import DEGENERATE_DET, AtomicAssemblyKernel
from .lockstep import element_determinants, run_lockstep
from .runtime import DeviceBuffer, launch
from .sparsity import SparsityPattern


@dataclass(frozen=True)
class AssemblyStats:
    """Timing and geometry of one assembly."""
    elements: int
    blocks: int
    work_items: int
    engine: str
    mode: str
    workers: int
    evaluator: str
    kernel_seconds: float


@dataclass(frozen=True, eq=False)
class GlobalSystem:
    """The assembled system A x = b."""
    A: Union[DenseMatrix, EllMatrix]
    b: np.ndarray
    stats: Optional[AssemblyStats] = None

    @property
    def n(self) -> int:
        return len(self.b)

    @property
    def layout(self) -> str:
        return "dense" if isinstance(self.A, DenseMatrix) else "ell"

    def dense(self) -> np.ndarray:
        return self.A.to_dense()


def _launch_config_for(cf: CompiledForm, cfg: LaunchConfig) -> LaunchConfig:
    if cfg.n_quad == cf.n_quad and cfg.n_local == cf.n_local:
        return cfg
    return LaunchConfig(**{**cfg.model_dump(), "n_quad": cf.n_quad, "n_local": cf.n_local})


def _run(cf: CompiledForm, d: DeviceArrays, cfg: LaunchConfig,
         evaluator: Union[str, IntegrandEvaluator], A: DeviceBuffer, b: DeviceBuffer,
         pattern: Optional[SparsityPattern]) -> AssemblyStats:
    cfg = _launch_config_for(cf, cfg)
    if not isinstance(evaluator, IntegrandEvaluator):
        evaluator = create_evaluator(evaluator, cf)
    grid = cfg.grid_dim(d.n_elements)
    logging.info(f"Launching grid={grid} block={cfg.block_dim} engine={cfg.engine} mode={cfg.mode}")
    started = time.perf_counter()
    if cfg.engine == "cooperative":
        kernel = AtomicAssemblyKernel(evaluator, cf.rule, d.n_elements, d.n_nodes, pattern)
        launch(kernel, grid, cfg.block_dim, (d.X, d.Y, d.gIdx, A, b),
               mode=cfg.mode, workers=cfg.workers, seed=cfg.seed)
        work_items = grid
    else:
        if pattern is None:
            def scatter(rows, cols, values):
                A.atomic_add_at(rows * d.n_nodes + cols, values)
        else:
            def scatter(rows, cols, values):
                A.atomic_add_at(rows * pattern.max_nz + pattern.slots(rows, cols), values)
        work_items = run_lockstep(evaluator, cf.rule, d, cfg, scatter, b)
    elapsed = time.perf_counter() - started
    logging.info(f"Assembled {d.n_elements} elements in {elapsed * 1e3:.1f} ms")
    return AssemblyStats(d.n_elements, grid, work_items, cfg.engine, cfg.mode,
                         cfg.effective_workers(), evaluator.name, elapsed)


def assemble_dense(cf: CompiledForm, d: DeviceArrays, cfg: LaunchConfig,
                   evaluator: Union[str, IntegrandEvaluator] = "compiled") -> GlobalSystem:
    """
    Assemble the dense N x N system with the atomic-add algorithm.

    Global A and b are zeroed on the host before the launch.

    Args:
        cf: Compiled form
        d: Flattened mesh
        cfg: Launch configuration
        evaluator: ``compiled``, ``interpreted`` or an evaluator instance

    Returns:
        The dense global system with assembly statistics

    Raises:
        DegenerateElementError: If an element has |det J| <= 1e-14
    """
    n = d.n_nodes
    A = DeviceBuffer(n * n)
    b = DeviceBuffer(n)
    stats = _run(cf, d, cfg, evaluator, A, b, None)
    return GlobalSystem(DenseMatrix(A.data.reshape(n, n)), b.data, stats)


def check_pattern(d: DeviceArrays, sp: SparsityPattern) -> None:
    """Verify that every local entry of every element has a slot in ``sp``."""
    if sp.n_rows != d.n_nodes:
        raise SparsityMismatchError(
            f"Sparsity pattern has {sp.n_rows} rows but the mesh has {d.n_nodes} nodes")
    idx = d.gIdx.reshape(-1, 3)
    sp.slots(np.repeat(idx, 3, axis=1).ravel(), np.tile(idx, (1, 3)).ravel())


def assemble_sparse(cf: CompiledForm, d: DeviceArrays, sp: SparsityPattern, cfg: LaunchConfig,
                    evaluator: Union[str, IntegrandEvaluator] = "compiled") -> GlobalSystem:
    """
    Assemble the N x MAX_NZ ELL system; the scatter binary-searches each row slice.

    Raises:
        SparsityMismatchError: If ``sp`` does not belong to the mesh behind ``d``
        DegenerateElementError: If an element has |det J| <= 1e-14
    """
    check_pattern(d, sp)
    A = DeviceBuffer(sp.n_rows * sp.max_nz)
    b = DeviceBuffer(d.n_nodes)
    stats = _run(cf, d, cfg, evaluator, A, b, sp)
    return GlobalSystem(EllMatrix.from_pattern(sp, A.data), b.data, stats)


def reference_assemble(form: Union[WeakForm, InstantiatedForm, CompiledForm], m: Mesh,
                       rule: Optional[QuadratureRule] = None) -> GlobalSystem:
    """
    Sequential reference assembly with the tree evaluator.

    Integrands are evaluated per (entry, quadrature point) over all elements
    at once; contributions are then added element by element in ascending
    order with a plain loop. No kernel programs and no atomics are involved.

    Raises:
        DegenerateElementError: If an element has |det J| <= 1e-14
    """
    if isinstance(form, CompiledForm):
        rule = rule or form.rule
        form = form.source
    elif isinstance(form, WeakForm):
        form = instantiate(form)
    rule = rule or quadrature_rule(2)
    n_local = form.n_local
    elements = m.elements
    xs = m.nodes[elements, 0]
    ys = m.nodes[elements, 1]

    det = element_determinants(xs, ys)
    bad = np.flatnonzero(np.abs(det) <= DEGENERATE_DET)
    if bad.size:
        raise DegenerateElementError(int(bad[0]), float(det[bad[0]]))

    local_a = np.zeros((m.n_elements, n_local, n_local))
    local_b = np.zeros((m.n_elements, n_local))
    for (xi, eta), w in zip(rule.points, rule.weights):
        values = {"xi": float(xi), "eta": float(eta)}
        for k in range(n_local):
            values[KERNEL_ARGUMENTS[2 + 2 * k]] = xs[:, k]
            values[KERNEL_ARGUMENTS[3 + 2 * k]] = ys[:, k]
        for i in range(n_local):
            for j in range(n_local):
                local_a[:, i, j] += evaluate_array(form.bilinear[i][j], values) * float(w)
            local_b[:, i] += evaluate_array(form.linear[i], values) * float(w)

    n = m.n_nodes
    A = np.zeros((n, n))
    b = np.zeros(n)
    for e in range(m.n_elements):
        nodes = elements[e]
        for i in range(n_local):
            for j in range(n_local):
                A[nodes[i], nodes[j]] += local_a[e, i, j]
            b[nodes[i]] += local_b[e, i]
    return GlobalSystem(DenseMatrix(A), b)
