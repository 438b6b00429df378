"""
A small SIMT runtime: global buffers with atomic addition, per-block shared
memory, barriers and grid launches.

A kernel is a callable ``kernel(ctx, *args)``. Kernels that synchronize are
generator functions that ``yield ctx.syncthreads()``; the threads of one
block are stepped cooperatively from barrier to barrier in (z, y, x) order,
so one block always runs on a single host worker.
"""
import inspect
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from ..errors import BarrierDeadlockError, DeviceError
from .config import MAX_THREADS_PER_BLOCK

Dim3 = Tuple[int, int, int]


class _Barrier:
    def __repr__(self) -> str:
        return "BARRIER"


BARRIER = _Barrier()


class DeviceBuffer:
    """A global-memory float64 array whose additions are linearizable."""

    def __init__(self, size: int):
        self.data = np.zeros(size, dtype=np.float64)
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self.data)

    def atomic_add(self, index: int, value: float) -> float:
        """Add ``value`` to one cell and return the previous value."""
        with self._lock:
            old = self.data[index]
            self.data[index] = old + value
        return float(old)

    def atomic_add_at(self, indices: np.ndarray, values: np.ndarray) -> None:
        """Apply many atomic additions in index order as one critical section."""
        with self._lock:
            np.add.at(self.data, indices, values)


class ThreadContext:
    """What one simulated thread sees: its indices and its block's shared memory."""

    __slots__ = ("thread_idx", "block_idx", "block_dim", "grid_dim", "shared")

    def __init__(self, thread_idx: Dim3, block_idx: int, block_dim: Dim3, grid_dim: int,
                 shared: Dict[str, np.ndarray]):
        self.thread_idx = thread_idx
        self.block_idx = block_idx
        self.block_dim = block_dim
        self.grid_dim = grid_dim
        self.shared = shared

    def syncthreads(self) -> _Barrier:
        return BARRIER

    @staticmethod
    def shared_atomic_add(array: np.ndarray, index, value: float) -> float:
        # threads of a block never run concurrently, so a plain add is atomic here
        old = array[index]
        array[index] = old + value
        return float(old)


def run_block(kernel: Callable, block_idx: int, block_dim: Dim3, grid_dim: int,
              args: Sequence[Any] = ()) -> None:
    """
    Execute one thread block to completion.

    Raises:
        BarrierDeadlockError: If some threads exit while others wait at a barrier
    """
    allocate = getattr(kernel, "allocate_shared", None)
    shared = allocate(block_dim) if allocate is not None else {}
    bx, by, bz = block_dim
    pending = []
    for z in range(bz):
        for y in range(by):
            for x in range(bx):
                ctx = ThreadContext((x, y, z), block_idx, block_dim, grid_dim, shared)
                result = kernel(ctx, *args)
                if inspect.isgenerator(result):
                    pending.append(result)
    phase = 0
    while pending:
        waiting = []
        finished = 0
        for thread in pending:
            try:
                signal = next(thread)
            except StopIteration:
                finished += 1
                continue
            if signal is not BARRIER:
                raise DeviceError(f"Kernel yielded {signal!r}; only barriers may be yielded")
            waiting.append(thread)
        if waiting and finished:
            raise BarrierDeadlockError(
                f"Block {block_idx}: {finished} thread(s) exited while {len(waiting)} "
                f"wait at barrier {phase}")
        pending = waiting
        phase += 1


def launch(kernel: Callable, grid_dim: int, block_dim: Dim3, args: Sequence[Any] = (),
           mode: str = "deterministic", workers: int = 1, seed: Optional[int] = None) -> None:
    """
    Launch ``kernel`` over ``grid_dim`` blocks.

    Args:
        kernel: Thread function or generator function
        grid_dim: Number of blocks
        block_dim: (x, y, z) threads per block
        args: Extra arguments passed to every thread
        mode: ``deterministic`` runs blocks in ascending order on the caller;
            ``parallel`` shuffles them with ``seed`` over ``workers`` threads
        workers: Pool size in parallel mode
        seed: Shuffle seed

    Raises:
        DeviceError: If the block exceeds the thread limit
    """
    bx, by, bz = block_dim
    if bx * by * bz > MAX_THREADS_PER_BLOCK:
        raise DeviceError(f"Block {block_dim} exceeds {MAX_THREADS_PER_BLOCK} threads")
    if mode == "deterministic":
        for block in range(grid_dim):
            run_block(kernel, block, block_dim, grid_dim, args)
        return
    order = np.random.default_rng(seed).permutation(grid_dim)
    logging.debug(f"Launching {grid_dim} blocks on {workers} workers")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_block, kernel, int(block), block_dim, grid_dim, args)
                   for block in order]
        for future in futures:
            future.result()
