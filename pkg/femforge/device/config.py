"""
Launch configuration of the simulated device.
"""
import logging
import math
import os
from typing import Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

# Thread-count limit of one block on real hardware.
MAX_THREADS_PER_BLOCK = 1024

_MODE_ALIASES = {
    "det": "deterministic",
    "deterministic": "deterministic",
    "par": "parallel",
    "parallel": "parallel",
}


class LaunchConfig(BaseModel):
    """Block geometry and scheduling of one assembly launch."""
    model_config = ConfigDict(frozen=True)

    n_quad: int = Field(3, ge=1, description="Quadrature points per element (blockDim.x)")
    n_local: int = Field(3, ge=1, description="Local nodes per element; blockDim.y is n_local squared")
    elems_per_block: int = Field(4, ge=1, description="Elements per thread block (blockDim.z)")
    mode: Literal["deterministic", "parallel"] = Field(
        "deterministic", description="Fixed block order on one worker, or shuffled blocks on a pool")
    workers: int = Field(1, ge=1, description="Host workers used in parallel mode")
    seed: Optional[int] = Field(None, description="Seed of the block shuffle in parallel mode")
    engine: Literal["lockstep", "cooperative"] = Field(
        "lockstep", description="Array-at-a-time execution or per-thread cooperative stepping")
    chunk_elements: int = Field(4096, ge=1, description="Elements per lockstep work item")

    @model_validator(mode="after")
    def check_block_size(self) -> "LaunchConfig":
        threads = self.threads_per_block
        if threads > MAX_THREADS_PER_BLOCK:
            raise ValueError(
                f"Block of {self.block_dim} has {threads} threads, limit is {MAX_THREADS_PER_BLOCK}")
        return self

    @property
    def block_dim(self) -> Tuple[int, int, int]:
        return (self.n_quad, self.n_local * self.n_local, self.elems_per_block)

    @property
    def threads_per_block(self) -> int:
        bx, by, bz = self.block_dim
        return bx * by * bz

    def grid_dim(self, n_elements: int) -> int:
        return math.ceil(n_elements / self.elems_per_block)

    def effective_workers(self) -> int:
        return self.workers if self.mode == "parallel" else 1


def normalize_mode(mode: str) -> str:
    try:
        return _MODE_ALIASES[mode.lower()]
    except KeyError:
        raise ValueError(f"Unsupported execution mode: {mode}") from None


def create_launch_config(
    mode: str = "deterministic",
    workers: int = 1,
    elems_per_block: int = 4,
    seed: Optional[int] = None,
    engine: str = "lockstep",
    n_quad: int = 3,
    n_local: int = 3,
    chunk_elements: int = 4096,
) -> LaunchConfig:
    """
    Create a launch configuration.

    Args:
        mode: ``deterministic``/``det`` or ``parallel``/``par``
        workers: Worker count for parallel mode
        elems_per_block: Elements per thread block
        seed: Block shuffle seed
        engine: ``lockstep`` or ``cooperative``
        n_quad: Quadrature points per element
        n_local: Local nodes per element
        chunk_elements: Lockstep work item size

    Returns:
        A validated LaunchConfig

    Raises:
        ValueError: If the mode or engine is not supported or the block is too large
    """
    mode = normalize_mode(mode)
    engine = engine.lower()
    if engine not in ("lockstep", "cooperative"):
        raise ValueError(f"Unsupported engine: {engine}")
    logging.info(f"Launch config: mode={mode}, workers={workers}, elems_per_block={elems_per_block}, engine={engine}")
    return LaunchConfig(n_quad=n_quad, n_local=n_local, elems_per_block=elems_per_block,
                        mode=mode, workers=workers, seed=seed, engine=engine,
                        chunk_elements=chunk_elements)


def workers_from_env(default: int = 1) -> int:
    """
    Worker count from FEMFORGE_WORKERS.

    Raises:
        ValueError: If the variable is set but not a positive integer
    """
    raw = os.getenv("FEMFORGE_WORKERS")
    if raw is None or raw.strip() == "":
        return default
    try:
        workers = int(raw)
    except ValueError:
        raise ValueError("FEMFORGE_WORKERS environment variable must be a positive integer") from None
    if workers < 1:
        raise ValueError("FEMFORGE_WORKERS environment variable must be a positive integer")
    return workers


def create_launch_config_from_env(**overrides) -> LaunchConfig:
    """
    Create a launch configuration whose worker count defaults to FEMFORGE_WORKERS.

    Environment variables:
    - FEMFORGE_WORKERS: Default worker count (default 1)

    Args:
        **overrides: Any argument of ``create_launch_config``

    Returns:
        A validated LaunchConfig
    """
    if overrides.get("workers") is None:
        overrides["workers"] = workers_from_env()
    return create_launch_config(**overrides)
