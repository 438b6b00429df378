"""
Simulated GPU execution of the atomic-add assembly algorithm.
"""
from .arrays import DeviceArrays, flatten_mesh
from .assembly import (
    AssemblyStats,
    GlobalSystem,
    assemble_dense,
    assemble_sparse,
    check_pattern,
    reference_assemble,
)
from .config import (
    LaunchConfig,
    create_launch_config,
    create_launch_config_from_env,
    workers_from_env,
)
from .kernels import DEGENERATE_DET, AtomicAssemblyKernel
from .runtime import BARRIER, DeviceBuffer, ThreadContext, launch, run_block
from .sparsity import SparsityPattern, build_sparsity

__all__ = [
    "AssemblyStats",
    "AtomicAssemblyKernel",
    "BARRIER",
    "DEGENERATE_DET",
    "DeviceArrays",
    "DeviceBuffer",
    "GlobalSystem",
    "LaunchConfig",
    "SparsityPattern",
    "ThreadContext",
    "assemble_dense",
    "assemble_sparse",
    "build_sparsity",
    "check_pattern",
    "create_launch_config",
    "create_launch_config_from_env",
    "flatten_mesh",
    "launch",
    "reference_assemble",
    "run_block",
    "workers_from_env",
]
