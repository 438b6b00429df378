"""
The atomic-add assembly kernel, one simulated thread at a time.

Thread (x, y, z) of block ``B`` handles quadrature point ``x`` of local entry
``y`` of element ``B * elems_per_block + z``:

1. stage the element's coordinates and global indices in shared memory and
   zero the shared local matrix and vector;
2. barrier;
3. evaluate the entry integrand at the quadrature point, scale by the
   weight and atomically add it to the shared local matrix (entries
   ``y < n_local`` also add the load-vector integrand);
4. barrier;
5. thread x = 0 atomically adds its local entry to the global matrix and
   vector.
"""
from typing import Optional

import numpy as np

from ..codegen.evaluators import BILINEAR, LINEAR, IntegrandEvaluator
from ..errors import DegenerateElementError
from ..fem.reference import QuadratureRule
from .runtime import DeviceBuffer, ThreadContext
from .sparsity import SparsityPattern

# |det J| at or below this is treated as a degenerate element.
DEGENERATE_DET = 1e-14


class AtomicAssemblyKernel:
    """Generator kernel for dense (``pattern is None``) or ELL global storage."""

    def __init__(self, evaluator: IntegrandEvaluator, rule: QuadratureRule, n_elements: int,
                 n_nodes: int, pattern: Optional[SparsityPattern] = None):
        self.evaluator = evaluator
        self.n_local = evaluator.n_local
        self.points = [(float(p[0]), float(p[1])) for p in rule.points]
        self.weights = [float(w) for w in rule.weights]
        self.n_elements = n_elements
        self.n_nodes = n_nodes
        self.pattern = pattern

    def allocate_shared(self, block_dim) -> dict:
        _, n_entries, bz = block_dim
        nan = np.nan
        return {
            "X": np.full((bz, self.n_local), nan),
            "Y": np.full((bz, self.n_local), nan),
            "idx": np.full((bz, self.n_local), -1, dtype=np.int64),
            "A": np.full((bz, n_entries), nan),
            "b": np.full((bz, self.n_local), nan),
        }

    def __call__(self, ctx: ThreadContext, X: np.ndarray, Y: np.ndarray, gIdx: np.ndarray,
                 A: DeviceBuffer, b: DeviceBuffer):
        q, entry, le = ctx.thread_idx
        n_local = self.n_local
        e = ctx.block_idx * ctx.block_dim[2] + le
        live = e < self.n_elements
        shared = ctx.shared

        if q == 0:
            if live and entry < n_local:
                k = e * n_local + entry
                shared["X"][le, entry] = X[k]
                shared["Y"][le, entry] = Y[k]
                shared["idx"][le, entry] = gIdx[k]
            shared["A"][le, entry] = 0.0
            if entry < n_local:
                shared["b"][le, entry] = 0.0
        yield ctx.syncthreads()

        if live:
            xs, ys = shared["X"][le], shared["Y"][le]
            if q == 0 and entry == 0:
                det = (xs[1] - xs[0]) * (ys[2] - ys[0]) - (xs[2] - xs[0]) * (ys[1] - ys[0])
                if abs(det) <= DEGENERATE_DET:
                    raise DegenerateElementError(e, det)
            xi, eta = self.points[q]
            args = [xi, eta]
            for k in range(n_local):
                args.append(float(xs[k]))
                args.append(float(ys[k]))
            w = self.weights[q]
            ctx.shared_atomic_add(shared["A"], (le, entry),
                                  self.evaluator.evaluate(BILINEAR, entry, args) * w)
            if entry < n_local:
                ctx.shared_atomic_add(shared["b"], (le, entry),
                                      self.evaluator.evaluate(LINEAR, entry, args) * w)
        yield ctx.syncthreads()

        if live and q == 0:
            idx = shared["idx"][le]
            i, j = divmod(entry, n_local)
            gi, gj = int(idx[i]), int(idx[j])
            if self.pattern is None:
                A.atomic_add(gi * self.n_nodes + gj, shared["A"][le, entry])
            else:
                A.atomic_add(gi * self.pattern.max_nz + self.pattern.slot(gi, gj),
                             shared["A"][le, entry])
            if entry < n_local:
                b.atomic_add(int(idx[entry]), shared["b"][le, entry])
